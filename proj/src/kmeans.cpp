#include "mdstyle/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "mdstyle/common.hpp"

namespace mdstyle {

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Returns WCSS; fills `assign` with the nearest centroid per point.
double assign_points(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& centroids,
                     std::vector<std::size_t>& assign) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double d = sqdist(x[i], centroids[c]);
            if (d < best) {
                best = d;
                assign[i] = c;
            }
        }
        total += best;
    }
    return total;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& x, std::size_t k, std::uint64_t seed, int max_iters) {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (k > x.size()) throw InvalidArgument("k exceeds the number of points");
    require(max_iters >= 0, "max_iters must be >= 0");
    const std::size_t dim = x[0].size();
    for (const auto& p : x) require(p.size() == dim, "points have differing dimensions");

    std::mt19937_64 rng(derive_seed(seed, "kmeans++"));
    KMeansResult r;
    r.centroids.push_back(x[std::uniform_int_distribution<std::size_t>(0, x.size() - 1)(rng)]);
    std::vector<double> d2(x.size());
    while (r.centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            d2[i] = std::numeric_limits<double>::infinity();
            for (const auto& c : r.centroids) d2[i] = std::min(d2[i], sqdist(x[i], c));
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (pick = 0; pick + 1 < x.size(); ++pick) {
                if (u < d2[pick]) break;
                u -= d2[pick];
            }
        } else {
            pick = r.centroids.size();  // all points coincide with a centroid
        }
        r.centroids.push_back(x[pick]);
    }

    r.assignments.assign(x.size(), 0);
    r.wcss.push_back(assign_points(x, r.centroids, r.assignments));
    for (int it = 0; it < max_iters; ++it) {
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            ++counts[r.assignments[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[r.assignments[i]][d] += x[i][d];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);

        std::vector<std::size_t> next(x.size(), 0);
        r.wcss.push_back(assign_points(x, r.centroids, next));
        ++r.iterations;
        const bool fixed = next == r.assignments;
        r.assignments = std::move(next);
        if (fixed) break;
    }
    return r;
}

}  // namespace mdstyle
