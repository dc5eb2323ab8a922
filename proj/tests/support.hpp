#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mdstyle/image.hpp"
#include "mdstyle/tensor.hpp"

namespace testing {

inline mdstyle::ImageGrid random_image(std::size_t rows, std::size_t cols, std::uint64_t seed, float lo = 0.0f,
                                       float hi = 1.0f) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(lo, hi);
    std::vector<float> px(rows * cols);
    for (auto& p : px) p = u(rng);
    return mdstyle::ImageGrid(rows, cols, std::move(px));
}

inline mdstyle::Tensor random_tensor(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed,
                                     double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    mdstyle::Tensor t(c, h, w);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
    return t;
}

inline mdstyle::ImageGrid gaussian_blob(std::size_t rows, std::size_t cols, double r0, double c0, double sigma,
                                        float peak = 1.0f) {
    mdstyle::ImageGrid img(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0);
            img.set(r, c, peak * std::exp(-d2 / (2 * sigma * sigma)));
        }
    return img;
}

// |a-b| / max(|a|,|b|, floor)
inline double rel_err(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("mdstyle_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
