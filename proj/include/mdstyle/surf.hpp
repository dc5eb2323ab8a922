#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mdstyle/image.hpp"

namespace mdstyle {

/// Summed-area table with a zero guard row and column.
class IntegralImage {
public:
    explicit IntegralImage(const ImageGrid& img);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    /// Sum of pixels in [0..r] x [0..c].
    double at(std::size_t r, std::size_t c) const noexcept { return table_[(r + 1) * (cols_ + 1) + c + 1]; }

    /// Sum over the rows x cols box whose top-left corner is (r0, c0). The
    /// box is clipped to the image, so parts outside contribute zero.
    double box(long r0, long c0, long rows, long cols) const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> table_;
};

struct Keypoint {
    double row = 0.0;
    double col = 0.0;
    double scale = 0.0;     // 1.2 * filter_size / 9
    double response = 0.0;  // determinant-of-Hessian
    int filter_size = 0;
};

struct DetectorConfig {
    int octaves = 3;
    double threshold = 4e-4;
};

/// Box-filter Hessian determinant Dxx*Dyy - (0.9*Dxy)^2, normalised by the
/// filter area squared. Caller guarantees the filter fits around (r, c).
double hessian_response(const IntegralImage& ii, long r, long c, int filter_size);

/// Half-width of the region a filter of this size needs around its centre.
inline long filter_margin(int filter_size) noexcept { return (filter_size - 1) / 2; }

/// Fast-Hessian detector with 4 filter sizes per octave, sampling step
/// doubling per octave and 3x3x3 non-maximum suppression. Sorted by
/// response, descending.
std::vector<Keypoint> detect_keypoints(const ImageGrid& img, const DetectorConfig& cfg = {});

inline constexpr std::size_t kDescriptorSize = 64;
using Descriptor = std::array<double, kDescriptorSize>;

/// Pixels needed on every side of a keypoint for describe().
long descriptor_margin(double scale) noexcept;

/// Upright SURF descriptor: 4x4 subregions of (sum dx, sum |dx|, sum dy,
/// sum |dy|) Haar responses, unit L2 norm. All zeros when the patch is flat.
/// Throws InvalidArgument("insufficient margin") near the border.
Descriptor describe(const ImageGrid& img, const Keypoint& kp);
Descriptor describe(const IntegralImage& ii, const Keypoint& kp);

inline constexpr std::size_t kEmbeddingSize = 2 * kDescriptorSize;

/// Per-dimension mean then population standard deviation over the
/// descriptors of every keypoint that has room for one. Zero if none.
std::array<double, kEmbeddingSize> image_embedding(const ImageGrid& img, const DetectorConfig& cfg = {});

}  // namespace mdstyle
