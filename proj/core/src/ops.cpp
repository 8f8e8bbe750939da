#include "sketchnet/ops.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"

namespace sketchnet {

std::string to_string(const Shape& s)
{
    return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

namespace {

void check_kernel(std::size_t out, std::size_t in, std::size_t kh, std::size_t kw)
{
    if (out == 0 || in == 0) {
        throw DimensionError("convolution needs at least one input and one output channel");
    }
    if (kh == 0 || kw == 0 || kh % 2 == 0 || kw % 2 == 0) {
        throw DimensionError("kernel extents must be odd and >= 1, got " + std::to_string(kh) + "x" +
                             std::to_string(kw));
    }
}

std::string kernel_string(std::size_t out, std::size_t in, std::size_t kh, std::size_t kw)
{
    return std::to_string(out) + "x" + std::to_string(in) + "x" + std::to_string(kh) + "x" + std::to_string(kw);
}

}  // namespace

template <typename T>
ConvParams<T>::ConvParams(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_h,
                          std::size_t kernel_w)
    : ConvParams(out_channels, in_channels, kernel_h, kernel_w,
                 std::vector<T>(out_channels * in_channels * kernel_h * kernel_w, T{0}),
                 std::vector<T>(out_channels, T{0}))
{
}

template <typename T>
ConvParams<T>::ConvParams(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_h,
                          std::size_t kernel_w, std::vector<T> weights, std::vector<T> bias)
    : out_(out_channels), in_(in_channels), kh_(kernel_h), kw_(kernel_w), weights_(std::move(weights)),
      bias_(std::move(bias))
{
    check_kernel(out_, in_, kh_, kw_);
    if (weights_.size() != out_ * in_ * kh_ * kw_) {
        throw DimensionError("weight array of length " + std::to_string(weights_.size()) +
                             " does not match kernel " + kernel_string(out_, in_, kh_, kw_));
    }
    if (bias_.size() != out_) {
        throw DimensionError("bias length " + std::to_string(bias_.size()) + " does not match " +
                             std::to_string(out_) + " output channels");
    }
}

Shape conv_output_shape(const Shape& input, std::size_t out_channels, std::size_t in_channels,
                        std::size_t kernel_h, std::size_t kernel_w)
{
    if (input.channels != in_channels) {
        throw DimensionError("input " + to_string(input) + " has " + std::to_string(input.channels) +
                             " channels but kernel " + kernel_string(out_channels, in_channels, kernel_h, kernel_w) +
                             " expects " + std::to_string(in_channels));
    }
    if (input.height < kernel_h || input.width < kernel_w) {
        throw DimensionError("input " + to_string(input) + " is smaller than kernel " +
                             std::to_string(kernel_h) + "x" + std::to_string(kernel_w));
    }
    return Shape{out_channels, input.height - kernel_h + 1, input.width - kernel_w + 1};
}

template <typename T>
Tensor<T> conv2d_valid(const Tensor<T>& input, const ConvParams<T>& params, unsigned threads)
{
    const Shape out_shape = conv_output_shape(input.shape(), params.out_channels(), params.in_channels(),
                                              params.kernel_h(), params.kernel_w());
    Tensor<T> out(out_shape);
    const std::size_t oh = out_shape.height;
    const std::size_t ow = out_shape.width;

    detail::parallel_for(params.out_channels(), threads, [&](std::size_t k) {
        const T b = params.bias()[k];
        for (std::size_t i = 0; i < oh; ++i) {
            auto o = out.row(k, i);
            for (std::size_t j = 0; j < ow; ++j) o[j] = b;
        }
        for (std::size_t c = 0; c < params.in_channels(); ++c) {
            for (std::size_t u = 0; u < params.kernel_h(); ++u) {
                for (std::size_t v = 0; v < params.kernel_w(); ++v) {
                    const T w = params.weight(k, c, u, v);
                    for (std::size_t i = 0; i < oh; ++i) {
                        T* __restrict o = out.row(k, i).data();
                        const T* __restrict x = input.row(c, i + u).data() + v;
                        for (std::size_t j = 0; j < ow; ++j) o[j] += w * x[j];
                    }
                }
            }
        }
    });
    return out;
}

template <typename T>
ConvGradients<T> conv2d_backward(const Tensor<T>& input, const ConvParams<T>& params, const Tensor<T>& grad_output,
                                 unsigned threads)
{
    const Shape out_shape = conv_output_shape(input.shape(), params.out_channels(), params.in_channels(),
                                              params.kernel_h(), params.kernel_w());
    if (grad_output.shape() != out_shape) {
        throw DimensionError("output gradient " + to_string(grad_output.shape()) +
                             " does not match forward output " + to_string(out_shape));
    }
    const std::size_t oh = out_shape.height;
    const std::size_t ow = out_shape.width;
    const std::size_t kh = params.kernel_h();
    const std::size_t kw = params.kernel_w();

    ConvGradients<T> grads{Tensor<T>(input.shape()),
                           ConvParams<T>(params.out_channels(), params.in_channels(), kh, kw)};

    detail::parallel_for(params.out_channels(), threads, [&](std::size_t k) {
        T bsum{0};
        for (std::size_t i = 0; i < oh; ++i) {
            for (T g : grad_output.row(k, i)) bsum += g;
        }
        grads.params.bias()[k] = bsum;
        for (std::size_t c = 0; c < params.in_channels(); ++c) {
            for (std::size_t u = 0; u < kh; ++u) {
                for (std::size_t v = 0; v < kw; ++v) {
                    T acc{0};
                    for (std::size_t i = 0; i < oh; ++i) {
                        const T* g = grad_output.row(k, i).data();
                        const T* x = input.row(c, i + u).data() + v;
                        for (std::size_t j = 0; j < ow; ++j) acc += g[j] * x[j];
                    }
                    grads.params.weight(k, c, u, v) = acc;
                }
            }
        }
    });

    detail::parallel_for(params.in_channels(), threads, [&](std::size_t c) {
        for (std::size_t k = 0; k < params.out_channels(); ++k) {
            for (std::size_t u = 0; u < kh; ++u) {
                for (std::size_t v = 0; v < kw; ++v) {
                    const T w = params.weight(k, c, u, v);
                    for (std::size_t i = 0; i < oh; ++i) {
                        T* __restrict gi = grads.input.row(c, i + u).data() + v;
                        const T* __restrict g = grad_output.row(k, i).data();
                        for (std::size_t j = 0; j < ow; ++j) gi[j] += w * g[j];
                    }
                }
            }
        }
    });
    return grads;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& input)
{
    Tensor<T> out(input.shape());
    auto dst = out.data();
    auto src = input.data();
    for (std::size_t n = 0; n < src.size(); ++n) dst[n] = src[n] > T{0} ? src[n] : T{0};
    return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_output)
{
    if (input.shape() != grad_output.shape()) {
        throw DimensionError("relu gradient " + to_string(grad_output.shape()) + " does not match input " +
                             to_string(input.shape()));
    }
    Tensor<T> out(input.shape());
    auto dst = out.data();
    auto x = input.data();
    auto g = grad_output.data();
    for (std::size_t n = 0; n < x.size(); ++n) dst[n] = x[n] > T{0} ? g[n] : T{0};
    return out;
}

namespace {

std::size_t scaled_extent(std::size_t dim, double scale)
{
    const auto n = std::llround(static_cast<double>(dim) * scale);
    if (n < 1) {
        throw DimensionError("resizing extent " + std::to_string(dim) + " by " + std::to_string(scale) +
                             " leaves no pixels");
    }
    return static_cast<std::size_t>(n);
}

// Source coordinate of output index `o` under corner alignment.
double source_coord(std::size_t o, std::size_t in, std::size_t out)
{
    if (out == 1) return static_cast<double>(in - 1) / 2.0;
    return static_cast<double>(o) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
}

}  // namespace

template <typename T>
Tensor<T> resize_bilinear(const Tensor<T>& input, double scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ArgumentError("resize scale must be a positive finite number, got " + std::to_string(scale));
    }
    if (scale == 1.0) return input;

    const std::size_t ih = input.height();
    const std::size_t iw = input.width();
    const std::size_t oh = scaled_extent(ih, scale);
    const std::size_t ow = scaled_extent(iw, scale);
    Tensor<T> out(Shape{input.channels(), oh, ow});

    for (std::size_t i = 0; i < oh; ++i) {
        const double sy = source_coord(i, ih, oh);
        const auto y0 = std::min(static_cast<std::size_t>(sy), ih - 1);
        const std::size_t y1 = std::min(y0 + 1, ih - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t j = 0; j < ow; ++j) {
            const double sx = source_coord(j, iw, ow);
            const auto x0 = std::min(static_cast<std::size_t>(sx), iw - 1);
            const std::size_t x1 = std::min(x0 + 1, iw - 1);
            const double fx = sx - static_cast<double>(x0);
            for (std::size_t c = 0; c < input.channels(); ++c) {
                const double top = (1.0 - fx) * input(c, y0, x0) + fx * input(c, y0, x1);
                const double bottom = (1.0 - fx) * input(c, y1, x0) + fx * input(c, y1, x1);
                out(c, i, j) = static_cast<T>((1.0 - fy) * top + fy * bottom);
            }
        }
    }
    return out;
}

#define SKETCHNET_INSTANTIATE_OPS(T)                                                                    \
    template class ConvParams<T>;                                                                       \
    template Tensor<T> conv2d_valid<T>(const Tensor<T>&, const ConvParams<T>&, unsigned);               \
    template ConvGradients<T> conv2d_backward<T>(const Tensor<T>&, const ConvParams<T>&, const Tensor<T>&, \
                                                 unsigned);                                             \
    template Tensor<T> relu<T>(const Tensor<T>&);                                                       \
    template Tensor<T> relu_backward<T>(const Tensor<T>&, const Tensor<T>&);                            \
    template Tensor<T> resize_bilinear<T>(const Tensor<T>&, double);

SKETCHNET_INSTANTIATE_OPS(float)
SKETCHNET_INSTANTIATE_OPS(double)

#undef SKETCHNET_INSTANTIATE_OPS

}  // namespace sketchnet
