#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdstyle/common.hpp"

namespace mdstyle {

/// Single-channel image with pixels in [0,1], stored row-major as f32.
///
/// Every stage of the pipeline (simulator, style transfer, descriptors,
/// classifier) exchanges spectrograms in this form. Pixels are f32 so that
/// the on-disk format round-trips exactly.
class ImageGrid {
public:
    ImageGrid() = default;
    ImageGrid(std::size_t rows, std::size_t cols, float fill = 0.0f)
        : rows_(rows), cols_(cols), pixels_(rows * cols, fill) {
        require(rows >= 1 && cols >= 1, "image dimensions must be >= 1x1");
        require(fill >= 0.0f && fill <= 1.0f, "pixel value outside [0,1]");
    }

    /// Takes ownership of `pixels`; throws unless every value is in [0,1].
    ImageGrid(std::size_t rows, std::size_t cols, std::vector<float> pixels)
        : rows_(rows), cols_(cols), pixels_(std::move(pixels)) {
        require(rows >= 1 && cols >= 1, "image dimensions must be >= 1x1");
        require(pixels_.size() == rows * cols, "pixel count does not match dimensions");
        for (float p : pixels_) require(p >= 0.0f && p <= 1.0f, "pixel value outside [0,1]");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    float operator()(std::size_t r, std::size_t c) const noexcept { return pixels_[r * cols_ + c]; }

    /// Writes a pixel, clamping to [0,1] (NaN maps to 0).
    void set(std::size_t r, std::size_t c, double v) noexcept {
        pixels_[r * cols_ + c] = clamp01(v);
    }

    std::span<const float> pixels() const noexcept { return pixels_; }

    static float clamp01(double v) noexcept {
        if (!(v > 0.0)) return 0.0f;
        if (v >= 1.0) return 1.0f;
        return static_cast<float>(v);
    }

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> pixels_;
};

}  // namespace mdstyle
