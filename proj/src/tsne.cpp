#include "mdstyle/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mdstyle/common.hpp"

namespace mdstyle {

namespace {

std::vector<double> squared_distances(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x[i].size(); ++k) {
                const double diff = x[i][k] - x[j][k];
                s += diff * diff;
            }
            d[i * n + j] = d[j * n + i] = s;
        }
    return d;
}

}  // namespace

std::vector<double> conditional_affinities(const std::vector<std::vector<double>>& x, double perplexity) {
    const std::size_t n = x.size();
    require(n >= 2, "need at least two points");
    require(perplexity > 1.0, "perplexity must exceed 1");
    for (const auto& row : x) {
        require(row.size() == x[0].size(), "points have differing dimensions");
        for (double v : row) require(std::isfinite(v), "points must be finite");
    }
    const auto d = squared_distances(x);
    const double target = std::log(perplexity);
    std::vector<double> p(n * n, 0.0);
    std::vector<double> row(n);

    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        // Shifting by the nearest distance keeps exp() away from underflow.
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) dmin = std::min(dmin, d[i * n + j]);
        for (int it = 0; it < 200; ++it) {
            double sum = 0.0, weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = j == i ? 0.0 : std::exp(-beta * (d[i * n + j] - dmin));
                sum += row[j];
                weighted += row[j] * (d[i * n + j] - dmin);
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            for (std::size_t j = 0; j < n; ++j) p[i * n + j] = row[j] / sum;
            const double diff = entropy - target;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
        }
    }
    return p;
}

TsneResult tsne(const std::vector<std::vector<double>>& x, const TsneConfig& cfg) {
    const std::size_t n = x.size();
    if (n < 5 || n > 5000) throw InvalidArgument("t-SNE needs between 5 and 5000 points");
    if (!(cfg.perplexity * 3.0 < static_cast<double>(n))) throw InvalidArgument("perplexity too large for point count");
    require(cfg.iterations >= 1 && cfg.learning_rate > 0.0, "invalid t-SNE schedule");

    const auto cond = conditional_affinities(x, cfg.perplexity);
    std::vector<double> P(n * n);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            P[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) / denom, 1e-300);
    for (std::size_t i = 0; i < n; ++i) P[i * n + i] = 0.0;

    const double step = cfg.scale_learning_rate
                            ? std::min(cfg.learning_rate,
                                       std::max(static_cast<double>(n) / (4.0 * cfg.exaggeration), 50.0))
                            : cfg.learning_rate;

    std::mt19937_64 rng(derive_seed(cfg.seed, "tsne-init"));
    std::normal_distribution<double> nd(0.0, 1e-4);
    std::vector<double> y(2 * n), update(2 * n, 0.0), gains(2 * n, 1.0), grad(2 * n);
    for (auto& v : y) v = nd(rng);

    TsneResult result;
    result.kl.reserve(static_cast<std::size_t>(cfg.iterations));
    std::vector<double> num(n * n);
    for (int it = 0; it < cfg.iterations; ++it) {
        const double exag = it < cfg.exaggeration_iters ? cfg.exaggeration : 1.0;
        const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num[i * n + i] = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j], dy = y[2 * i + 1] - y[2 * j + 1];
                const double q = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = num[j * n + i] = q;
                z += 2.0 * q;
            }
        }
        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double p = P[i * n + j];
                kl += p * std::log(p / std::max(num[i * n + j] / z, 1e-300));
            }
        result.kl.push_back(std::max(kl, 0.0));

        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = num[i * n + j];
                const double m = (exag * P[i * n + j] - q / z) * q;
                grad[2 * i] += 4.0 * m * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += 4.0 * m * (y[2 * i + 1] - y[2 * j + 1]);
            }

        for (std::size_t k = 0; k < 2 * n; ++k) {
            const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
            gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
            update[k] = momentum * update[k] - step * gains[k] * grad[k];
            y[k] += update[k];
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += y[2 * i];
            my += y[2 * i + 1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= mx;
            y[2 * i + 1] -= my;
        }
    }
    result.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.points[i] = {y[2 * i], y[2 * i + 1]};
    return result;
}

}  // namespace mdstyle
