#pragma once

#include <cstdint>
#include <vector>

namespace mdstyle {

struct KMeansResult {
    std::vector<std::size_t> assignments;
    std::vector<std::vector<double>> centroids;
    std::vector<double> wcss;  // after seeding, then after every Lloyd iteration
    int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment
/// stops changing or `max_iters` is reached. Ties go to the lowest index;
/// an emptied cluster keeps its previous centroid.
KMeansResult kmeans(const std::vector<std::vector<double>>& x, std::size_t k, std::uint64_t seed,
                    int max_iters = 300);

}  // namespace mdstyle
