#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sketchnet/errors.hpp"

namespace sketchnet {

/// (channels, height, width) extent of a dense tensor. All components are >= 1.
struct Shape {
    std::size_t channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    [[nodiscard]] constexpr std::size_t size() const noexcept { return channels * height * width; }
    [[nodiscard]] constexpr std::size_t plane() const noexcept { return height * width; }
    friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense channel-major array. Element (c, i, j) lives at (c * height + i) * width + j.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() : Tensor(Shape{}) {}

    explicit Tensor(Shape shape, T fill = T{0}) : shape_(checked(shape)), data_(shape_.size(), fill) {}

    Tensor(Shape shape, std::vector<T> data) : shape_(checked(shape)), data_(std::move(data))
    {
        if (data_.size() != shape_.size()) {
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match shape " + to_string(shape_));
        }
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t channels() const noexcept { return shape_.channels; }
    [[nodiscard]] std::size_t height() const noexcept { return shape_.height; }
    [[nodiscard]] std::size_t width() const noexcept { return shape_.width; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<T> data() noexcept { return data_; }
    [[nodiscard]] std::span<const T> data() const noexcept { return data_; }
    [[nodiscard]] const std::vector<T>& values() const noexcept { return data_; }

    [[nodiscard]] T& operator()(std::size_t c, std::size_t i, std::size_t j) noexcept
    {
        return data_[(c * shape_.height + i) * shape_.width + j];
    }
    [[nodiscard]] const T& operator()(std::size_t c, std::size_t i, std::size_t j) const noexcept
    {
        return data_[(c * shape_.height + i) * shape_.width + j];
    }

    /// One contiguous image row.
    [[nodiscard]] std::span<T> row(std::size_t c, std::size_t i) noexcept
    {
        return std::span<T>(data_).subspan((c * shape_.height + i) * shape_.width, shape_.width);
    }
    [[nodiscard]] std::span<const T> row(std::size_t c, std::size_t i) const noexcept
    {
        return std::span<const T>(data_).subspan((c * shape_.height + i) * shape_.width, shape_.width);
    }

    [[nodiscard]] std::span<const T> channel(std::size_t c) const noexcept
    {
        return std::span<const T>(data_).subspan(c * shape_.plane(), shape_.plane());
    }

    template <typename U>
    [[nodiscard]] Tensor<U> cast() const
    {
        std::vector<U> out(data_.begin(), data_.end());
        return Tensor<U>(shape_, std::move(out));
    }

    friend bool operator==(const Tensor& a, const Tensor& b)
    {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    static Shape checked(Shape s)
    {
        if (s.channels == 0 || s.height == 0 || s.width == 0) {
            throw DimensionError("tensor shape components must be >= 1, got " + to_string(s));
        }
        return s;
    }

    Shape shape_;
    std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace sketchnet
