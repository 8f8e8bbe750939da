#include "sketchnet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace sketchnet {

namespace {

bool inside(const TensorF& image, Point p)
{
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= static_cast<double>(image.width() - 1) &&
           p.y <= static_cast<double>(image.height() - 1);
}

// Bilinear sample where every out-of-image neighbour contributes black.
float sample_black_border(const TensorF& image, std::size_t c, double y, double x)
{
    const double fy = std::floor(y);
    const double fx = std::floor(x);
    const double wy = y - fy;
    const double wx = x - fx;
    const auto h = static_cast<long long>(image.height());
    const auto w = static_cast<long long>(image.width());
    double acc = 0.0;
    for (int dy = 0; dy < 2; ++dy) {
        const auto yy = static_cast<long long>(fy) + dy;
        const double ky = dy == 0 ? 1.0 - wy : wy;
        if (ky == 0.0 || yy < 0 || yy >= h) continue;
        for (int dx = 0; dx < 2; ++dx) {
            const auto xx = static_cast<long long>(fx) + dx;
            const double kx = dx == 0 ? 1.0 - wx : wx;
            if (kx == 0.0 || xx < 0 || xx >= w) continue;
            acc += ky * kx * image(c, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
        }
    }
    return static_cast<float>(acc);
}

}  // namespace

TensorF align_by_eyes(const TensorF& image, Point left_eye, Point right_eye)
{
    if (left_eye.x == right_eye.x && left_eye.y == right_eye.y) {
        throw ArgumentError("eye positions coincide; cannot solve the alignment transform");
    }
    if (!inside(image, left_eye) || !inside(image, right_eye)) {
        throw ArgumentError("eye positions must lie inside the " + to_string(image.shape()) + " image");
    }

    // Canvas point z' = a z + b for source point z, with points as x + iy.
    using cplx = std::complex<double>;
    const cplx src_l(left_eye.x, left_eye.y);
    const cplx src_r(right_eye.x, right_eye.y);
    const cplx dst_l(kCanonicalLeftEye.x, kCanonicalLeftEye.y);
    const cplx dst_r(kCanonicalRightEye.x, kCanonicalRightEye.y);
    const cplx a = (dst_r - dst_l) / (src_r - src_l);
    const cplx b = dst_l - a * src_l;

    TensorF out(Shape{image.channels(), kAlignedHeight, kAlignedWidth});
    for (std::size_t i = 0; i < kAlignedHeight; ++i) {
        for (std::size_t j = 0; j < kAlignedWidth; ++j) {
            const cplx src = (cplx(static_cast<double>(j), static_cast<double>(i)) - b) / a;
            for (std::size_t c = 0; c < image.channels(); ++c) {
                out(c, i, j) = std::clamp(sample_black_border(image, c, src.imag(), src.real()), 0.0f, 255.0f);
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> crop(const Tensor<T>& image, std::size_t top, std::size_t left, std::size_t out_h, std::size_t out_w)
{
    if (out_h == 0 || out_w == 0 || top + out_h > image.height() || left + out_w > image.width()) {
        throw DimensionError("crop window " + std::to_string(out_h) + "x" + std::to_string(out_w) + " at (" +
                             std::to_string(top) + ", " + std::to_string(left) + ") does not fit in " +
                             to_string(image.shape()));
    }
    Tensor<T> out(Shape{image.channels(), out_h, out_w});
    for (std::size_t c = 0; c < image.channels(); ++c) {
        for (std::size_t i = 0; i < out_h; ++i) {
            auto src = image.row(c, top + i).subspan(left, out_w);
            std::copy(src.begin(), src.end(), out.row(c, i).begin());
        }
    }
    return out;
}

template <typename T>
Tensor<T> crop_center(const Tensor<T>& image, std::size_t out_h, std::size_t out_w)
{
    if (out_h > image.height() || out_w > image.width()) {
        throw DimensionError("cannot crop " + std::to_string(out_h) + "x" + std::to_string(out_w) + " from " +
                             to_string(image.shape()));
    }
    return crop(image, (image.height() - out_h) / 2, (image.width() - out_w) / 2, out_h, out_w);
}

template <typename T>
Tensor<T> add_xy_channels(const Tensor<T>& photo)
{
    if (photo.channels() != 3) {
        throw DimensionError("XY channels are added to 3-channel photos, got " + to_string(photo.shape()));
    }
    const std::size_t h = photo.height();
    const std::size_t w = photo.width();
    Tensor<T> out(Shape{5, h, w});
    std::copy(photo.data().begin(), photo.data().end(), out.data().begin());
    for (std::size_t i = 0; i < h; ++i) {
        const double y = h > 1 ? static_cast<double>(i) * 255.0 / static_cast<double>(h - 1) : 0.0;
        for (std::size_t j = 0; j < w; ++j) {
            const double x = w > 1 ? static_cast<double>(j) * 255.0 / static_cast<double>(w - 1) : 0.0;
            out(3, i, j) = static_cast<T>(y);
            out(4, i, j) = static_cast<T>(x);
        }
    }
    return out;
}

template <typename T>
Tensor<T> take_channels(const Tensor<T>& image, std::size_t keep)
{
    if (keep == 0 || keep > image.channels()) {
        throw DimensionError("cannot keep " + std::to_string(keep) + " channels of " + to_string(image.shape()));
    }
    const auto n = keep * image.shape().plane();
    return Tensor<T>(Shape{keep, image.height(), image.width()},
                     std::vector<T>(image.data().begin(), image.data().begin() + static_cast<std::ptrdiff_t>(n)));
}

template <typename T>
Tensor<T> to_grayscale(const Tensor<T>& photo)
{
    if (photo.channels() != 3) {
        throw DimensionError("grayscale conversion needs a 3-channel image, got " + to_string(photo.shape()));
    }
    Tensor<T> out(Shape{1, photo.height(), photo.width()});
    auto r = photo.channel(0);
    auto g = photo.channel(1);
    auto b = photo.channel(2);
    auto dst = out.data();
    for (std::size_t n = 0; n < dst.size(); ++n) {
        dst[n] = static_cast<T>(0.299 * r[n] + 0.587 * g[n] + 0.114 * b[n]);
    }
    return out;
}

TensorF to_rgb(const TensorF& image)
{
    if (image.channels() == 3) return image;
    if (image.channels() != 1) {
        throw DimensionError("expected a 1- or 3-channel image, got " + to_string(image.shape()));
    }
    TensorF out(Shape{3, image.height(), image.width()});
    for (std::size_t c = 0; c < 3; ++c) {
        std::copy(image.data().begin(), image.data().end(), out.data().begin() + c * image.size());
    }
    return out;
}

TensorF clamp_pixels(TensorF image)
{
    for (auto& v : image.data()) v = std::clamp(v, 0.0f, 255.0f);
    return image;
}

#define SKETCHNET_INSTANTIATE_PREPROCESS(T)                                                              \
    template Tensor<T> crop<T>(const Tensor<T>&, std::size_t, std::size_t, std::size_t, std::size_t);   \
    template Tensor<T> crop_center<T>(const Tensor<T>&, std::size_t, std::size_t);                      \
    template Tensor<T> add_xy_channels<T>(const Tensor<T>&);                                            \
    template Tensor<T> take_channels<T>(const Tensor<T>&, std::size_t);                                 \
    template Tensor<T> to_grayscale<T>(const Tensor<T>&);

SKETCHNET_INSTANTIATE_PREPROCESS(float)
SKETCHNET_INSTANTIATE_PREPROCESS(double)

#undef SKETCHNET_INSTANTIATE_PREPROCESS

}  // namespace sketchnet
