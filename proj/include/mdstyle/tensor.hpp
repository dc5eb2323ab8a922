#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdstyle/common.hpp"
#include "mdstyle/image.hpp"

namespace mdstyle {

struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const noexcept { return channels * height * width; }
    std::size_t plane() const noexcept { return height * width; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Feature-map stack, channel-major (C x H x W), double precision.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0) : shape_(s), data_(s.size(), fill) {}
    Tensor(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0) : Tensor(Shape{c, h, w}, fill) {}

    const Shape& shape() const noexcept { return shape_; }
    std::size_t channels() const noexcept { return shape_.channels; }
    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t c, std::size_t y, std::size_t x) noexcept {
        return data_[(c * shape_.height + y) * shape_.width + x];
    }
    double operator()(std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return data_[(c * shape_.height + y) * shape_.width + x];
    }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    /// Row i of the channels x (H*W) flattening.
    std::span<const double> channel(std::size_t c) const noexcept {
        return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

inline Tensor to_tensor(const ImageGrid& img) {
    Tensor t(1, img.rows(), img.cols());
    for (std::size_t i = 0; i < img.size(); ++i) t[i] = img.pixels()[i];
    return t;
}

/// Clamps into [0,1]; requires a single-channel tensor.
inline ImageGrid to_image(const Tensor& t) {
    require(t.channels() == 1, "image conversion needs a single-channel tensor");
    std::vector<float> px(t.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = ImageGrid::clamp01(t[i]);
    return ImageGrid(t.height(), t.width(), std::move(px));
}

}  // namespace mdstyle
