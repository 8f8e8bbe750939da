#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sketchnet/tensor.hpp"

namespace sketchnet {

/// Weights and bias of one convolution layer.
///
/// Weights are stored (out_channels, in_channels, kernel_h, kernel_w), row-major.
/// Kernel extents must be odd.
template <typename T>
class ConvParams {
public:
    ConvParams(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_h, std::size_t kernel_w);
    ConvParams(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_h, std::size_t kernel_w,
               std::vector<T> weights, std::vector<T> bias);

    [[nodiscard]] std::size_t out_channels() const noexcept { return out_; }
    [[nodiscard]] std::size_t in_channels() const noexcept { return in_; }
    [[nodiscard]] std::size_t kernel_h() const noexcept { return kh_; }
    [[nodiscard]] std::size_t kernel_w() const noexcept { return kw_; }

    [[nodiscard]] T& weight(std::size_t k, std::size_t c, std::size_t u, std::size_t v) noexcept
    {
        return weights_[((k * in_ + c) * kh_ + u) * kw_ + v];
    }
    [[nodiscard]] const T& weight(std::size_t k, std::size_t c, std::size_t u, std::size_t v) const noexcept
    {
        return weights_[((k * in_ + c) * kh_ + u) * kw_ + v];
    }

    [[nodiscard]] std::span<T> weights() noexcept { return weights_; }
    [[nodiscard]] std::span<const T> weights() const noexcept { return weights_; }
    [[nodiscard]] std::span<T> bias() noexcept { return bias_; }
    [[nodiscard]] std::span<const T> bias() const noexcept { return bias_; }

    [[nodiscard]] bool same_shape(const ConvParams& other) const noexcept
    {
        return out_ == other.out_ && in_ == other.in_ && kh_ == other.kh_ && kw_ == other.kw_;
    }

    friend bool operator==(const ConvParams&, const ConvParams&) = default;

private:
    std::size_t out_;
    std::size_t in_;
    std::size_t kh_;
    std::size_t kw_;
    std::vector<T> weights_;
    std::vector<T> bias_;
};

template <typename T>
struct ConvGradients {
    Tensor<T> input;
    ConvParams<T> params;
};

/// Output shape of a stride-1, unpadded convolution. Throws DimensionError on mismatch.
Shape conv_output_shape(const Shape& input, std::size_t out_channels, std::size_t in_channels,
                        std::size_t kernel_h, std::size_t kernel_w);

/// Stride-1 valid cross-correlation plus bias (no kernel flip).
///
/// Each output element is accumulated in the fixed order bias, then (c, u, v)
/// lexicographically, so results do not depend on `threads`.
template <typename T>
Tensor<T> conv2d_valid(const Tensor<T>& input, const ConvParams<T>& params, unsigned threads = 1);

/// Reverse-mode derivative of conv2d_valid for a given output cotangent.
template <typename T>
ConvGradients<T> conv2d_backward(const Tensor<T>& input, const ConvParams<T>& params,
                                 const Tensor<T>& grad_output, unsigned threads = 1);

template <typename T>
Tensor<T> relu(const Tensor<T>& input);

/// Passes the gradient where input > 0; zero at and below 0.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_output);

/// Bilinear resize with corner-aligned sampling. Output extents are
/// round(dim * scale) and must come out >= 1. scale == 1 copies.
template <typename T>
Tensor<T> resize_bilinear(const Tensor<T>& input, double scale);

}  // namespace sketchnet
