#include "mdstyle/surf.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace mdstyle {

IntegralImage::IntegralImage(const ImageGrid& img)
    : rows_(img.rows()), cols_(img.cols()), table_((img.rows() + 1) * (img.cols() + 1), 0.0) {
    const std::size_t stride = cols_ + 1;
    for (std::size_t r = 0; r < rows_; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
            row_sum += img(r, c);
            table_[(r + 1) * stride + c + 1] = table_[r * stride + c + 1] + row_sum;
        }
    }
}

double IntegralImage::box(long r0, long c0, long rows, long cols) const noexcept {
    const long R = static_cast<long>(rows_), C = static_cast<long>(cols_);
    const long r1 = std::clamp(r0 + rows, 0L, R);
    const long c1 = std::clamp(c0 + cols, 0L, C);
    r0 = std::clamp(r0, 0L, R);
    c0 = std::clamp(c0, 0L, C);
    if (r1 <= r0 || c1 <= c0) return 0.0;
    const auto stride = static_cast<long>(cols_ + 1);
    auto t = [&](long r, long c) { return table_[static_cast<std::size_t>(r * stride + c)]; };
    return t(r1, c1) - t(r0, c1) - t(r1, c0) + t(r0, c0);
}

double hessian_response(const IntegralImage& ii, long r, long c, int filter_size) {
    const long w = filter_size;
    const long b = (w - 1) / 2;
    const long l = w / 3;
    const double inv_area = 1.0 / static_cast<double>(w * w);

    const double dxx = ii.box(r - l + 1, c - b, 2 * l - 1, w) - 3.0 * ii.box(r - l + 1, c - l / 2, 2 * l - 1, l);
    const double dyy = ii.box(r - b, c - l + 1, w, 2 * l - 1) - 3.0 * ii.box(r - l / 2, c - l + 1, l, 2 * l - 1);
    const double dxy = ii.box(r - l, c + 1, l, l) + ii.box(r + 1, c - l, l, l) - ii.box(r - l, c - l, l, l) -
                       ii.box(r + 1, c + 1, l, l);
    const double xx = dxx * inv_area, yy = dyy * inv_area, xy = dxy * inv_area;
    return xx * yy - 0.81 * xy * xy;
}

namespace {

struct ResponseLayer {
    int filter_size;
    long step;
    long rows, cols;             // sample grid
    std::vector<double> values;  // NaN where the filter does not fit

    double at(long i, long j) const { return values[static_cast<std::size_t>(i * cols + j)]; }
};

ResponseLayer build_layer(const IntegralImage& ii, int filter_size, long step) {
    ResponseLayer layer{filter_size, step, static_cast<long>(ii.rows()) / step, static_cast<long>(ii.cols()) / step,
                        {}};
    layer.values.assign(static_cast<std::size_t>(layer.rows * layer.cols), std::nan(""));
    const long m = filter_margin(filter_size);
    for (long i = 0; i < layer.rows; ++i) {
        const long r = i * step;
        if (r < m || r + m >= static_cast<long>(ii.rows())) continue;
        for (long j = 0; j < layer.cols; ++j) {
            const long c = j * step;
            if (c < m || c + m >= static_cast<long>(ii.cols())) continue;
            layer.values[static_cast<std::size_t>(i * layer.cols + j)] = hessian_response(ii, r, c, filter_size);
        }
    }
    return layer;
}

bool is_local_max(const std::array<const ResponseLayer*, 3>& stack, long i, long j, double v) {
    for (int s = 0; s < 3; ++s)
        for (long di = -1; di <= 1; ++di)
            for (long dj = -1; dj <= 1; ++dj) {
                if (s == 1 && di == 0 && dj == 0) continue;
                const long ii = i + di, jj = j + dj;
                if (ii < 0 || jj < 0 || ii >= stack[s]->rows || jj >= stack[s]->cols) return false;
                const double n = stack[s]->at(ii, jj);
                if (std::isnan(n) || n >= v) return false;
            }
    return true;
}

}  // namespace

std::vector<Keypoint> detect_keypoints(const ImageGrid& img, const DetectorConfig& cfg) {
    require(cfg.octaves >= 1, "detector needs at least one octave");
    const IntegralImage ii(img);
    std::vector<Keypoint> out;
    for (int o = 0; o < cfg.octaves; ++o) {
        const long step = 1L << o;
        const int base = 3 * ((1 << (o + 1)) + 1);  // 9, 15, 27, ...
        const int inc = 6 << o;
        std::array<ResponseLayer, 4> layers;
        for (int s = 0; s < 4; ++s) layers[s] = build_layer(ii, base + s * inc, step);
        for (int s = 1; s <= 2; ++s) {
            const std::array<const ResponseLayer*, 3> stack = {&layers[s - 1], &layers[s], &layers[s + 1]};
            const ResponseLayer& mid = layers[s];
            for (long i = 0; i < mid.rows; ++i)
                for (long j = 0; j < mid.cols; ++j) {
                    const double v = mid.at(i, j);
                    if (std::isnan(v) || !(v > cfg.threshold)) continue;
                    if (!is_local_max(stack, i, j, v)) continue;
                    out.push_back({static_cast<double>(i * step), static_cast<double>(j * step),
                                   1.2 * mid.filter_size / 9.0, v, mid.filter_size});
                }
        }
    }
    std::sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) {
        return std::tie(b.response, a.filter_size, a.row, a.col) < std::tie(a.response, b.filter_size, b.row, b.col);
    });
    return out;
}

long descriptor_margin(double scale) noexcept {
    const long s = std::lround(scale);
    return std::lround(12.0 * scale) + std::max(1L, s) + 1;
}

Descriptor describe(const ImageGrid& img, const Keypoint& kp) { return describe(IntegralImage(img), kp); }

Descriptor describe(const IntegralImage& ii, const Keypoint& kp) {
    require(kp.scale > 0.0 && std::isfinite(kp.row) && std::isfinite(kp.col), "invalid keypoint");
    const long m = descriptor_margin(kp.scale);
    const double R = static_cast<double>(ii.rows()), C = static_cast<double>(ii.cols());
    if (kp.row < m || kp.col < m || kp.row + m > R || kp.col + m > C) throw InvalidArgument("insufficient margin");

    const double s = kp.scale;
    const long haar = 2 * std::max(1L, std::lround(s));
    const long half = haar / 2;
    // 4x4 subregions, each 9x9 samples spaced s apart; neighbouring
    // subregions overlap by 4 samples.
    auto gauss = [](double x, double y, double sig) { return std::exp(-(x * x + y * y) / (2.0 * sig * sig)); };

    Descriptor d{};
    std::size_t n = 0;
    for (int qi = 0; qi < 4; ++qi) {
        for (int qj = 0; qj < 4; ++qj) {
            const double i = 5.0 * qi - 7.5, j = 5.0 * qj - 7.5;
            double sdx = 0.0, sadx = 0.0, sdy = 0.0, sady = 0.0;
            for (int a = -4; a <= 4; ++a) {
                for (int b = -4; b <= 4; ++b) {
                    const long r = std::lround(kp.row + (i + a) * s);
                    const long c = std::lround(kp.col + (j + b) * s);
                    const double g = gauss(a, b, 2.5);
                    const double dx = ii.box(r - half, c, haar, half) - ii.box(r - half, c - half, haar, half);
                    const double dy = ii.box(r, c - half, half, haar) - ii.box(r - half, c - half, half, haar);
                    sdx += g * dx;
                    sdy += g * dy;
                    sadx += g * std::abs(dx);
                    sady += g * std::abs(dy);
                }
            }
            const double g = gauss(qi - 1.5, qj - 1.5, 1.5);
            d[n++] = g * sdx;
            d[n++] = g * sadx;
            d[n++] = g * sdy;
            d[n++] = g * sady;
        }
    }
    double norm = 0.0;
    for (double v : d) norm += v * v;
    norm = std::sqrt(norm);
    if (norm <= 1e-9 * static_cast<double>(haar * haar)) return Descriptor{};
    for (auto& v : d) v /= norm;
    return d;
}

std::array<double, kEmbeddingSize> image_embedding(const ImageGrid& img, const DetectorConfig& cfg) {
    const IntegralImage ii(img);
    std::array<double, kEmbeddingSize> e{};
    std::vector<Descriptor> ds;
    for (const auto& kp : detect_keypoints(img, cfg)) {
        const long m = descriptor_margin(kp.scale);
        if (kp.row < m || kp.col < m || kp.row + m > static_cast<double>(img.rows()) ||
            kp.col + m > static_cast<double>(img.cols()))
            continue;
        ds.push_back(describe(ii, kp));
    }
    if (ds.empty()) return e;
    const double n = static_cast<double>(ds.size());
    for (const auto& d : ds)
        for (std::size_t k = 0; k < kDescriptorSize; ++k) e[k] += d[k] / n;
    for (const auto& d : ds)
        for (std::size_t k = 0; k < kDescriptorSize; ++k) {
            const double diff = d[k] - e[k];
            e[kDescriptorSize + k] += diff * diff / n;
        }
    for (std::size_t k = 0; k < kDescriptorSize; ++k) e[kDescriptorSize + k] = std::sqrt(e[kDescriptorSize + k]);
    return e;
}

}  // namespace mdstyle
