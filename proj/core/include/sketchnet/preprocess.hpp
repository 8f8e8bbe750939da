#pragma once

#include <cstddef>

#include "sketchnet/tensor.hpp"

namespace sketchnet {

/// Image-plane point: x is the column, y the row, both in pixels.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Geometry of the preprocessing pipeline (heights first).
inline constexpr std::size_t kAlignedHeight = 250;
inline constexpr std::size_t kAlignedWidth = 200;
inline constexpr std::size_t kPhotoHeight = 200;
inline constexpr std::size_t kPhotoWidth = 155;
inline constexpr std::size_t kSketchHeight = 188;
inline constexpr std::size_t kSketchWidth = 143;
inline constexpr Point kCanonicalLeftEye{75.0, 125.0};
inline constexpr Point kCanonicalRightEye{125.0, 125.0};

/// Similarity transform (rotation, uniform scale, translation) placing the
/// two eye centres at kCanonicalLeftEye / kCanonicalRightEye on a
/// kAlignedHeight x kAlignedWidth canvas. Bilinear sampling; samples falling
/// outside the source are black. Works for any channel count.
TensorF align_by_eyes(const TensorF& image, Point left_eye, Point right_eye);

/// Window of out_h x out_w at (top, left).
template <typename T>
Tensor<T> crop(const Tensor<T>& image, std::size_t top, std::size_t left, std::size_t out_h, std::size_t out_w);

/// Centered window. An odd margin leaves the extra pixel at the bottom/right.
template <typename T>
Tensor<T> crop_center(const Tensor<T>& image, std::size_t out_h, std::size_t out_w);

/// Appends two coordinate channels: row i mapped to i*255/(H-1) and column
/// j mapped to j*255/(W-1). A single-pixel extent maps to 0.
template <typename T>
Tensor<T> add_xy_channels(const Tensor<T>& photo);

/// Drops everything after the first `keep` channels.
template <typename T>
Tensor<T> take_channels(const Tensor<T>& image, std::size_t keep);

/// 0.299 R + 0.587 G + 0.114 B.
template <typename T>
Tensor<T> to_grayscale(const Tensor<T>& photo);

/// Replicates a single channel three times; 3-channel input is returned unchanged.
TensorF to_rgb(const TensorF& image);

/// Clamps every value into [0, 255].
TensorF clamp_pixels(TensorF image);

}  // namespace sketchnet
