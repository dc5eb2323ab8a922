#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mdstyle {

struct TsneConfig {
    double perplexity = 30.0;
    int iterations = 1000;
    double exaggeration = 12.0;
    int exaggeration_iters = 250;
    double learning_rate = 200.0;
    // When set, the step is max(n / (4 * exaggeration), 50) capped at
    // learning_rate; a fixed 200 oscillates for a few hundred points.
    bool scale_learning_rate = true;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch = 250;
    std::uint64_t seed = 0;
};

struct TsneResult {
    std::vector<std::array<double, 2>> points;
    std::vector<double> kl;  // KL(P || Q) of the un-exaggerated P, before each update
};

/// Conditional affinities p_{j|i} (rows sum to 1) with each row's bandwidth
/// found by bisection so its entropy matches log(perplexity) within 1e-5.
/// Row-major n x n.
std::vector<double> conditional_affinities(const std::vector<std::vector<double>>& x, double perplexity);

/// Exact O(n^2) t-SNE. Requires 5 <= n <= 5000 and perplexity < n / 3.
TsneResult tsne(const std::vector<std::vector<double>>& x, const TsneConfig& cfg = {});

}  // namespace mdstyle
