#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mdstyle/common.hpp"

namespace mdstyle {

/// Adam with bias correction.
struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step_count = 0;

    AdamState() = default;
    AdamState(std::size_t n, double learning_rate) : lr(learning_rate), m(n, 0.0), v(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads) {
        require(params.size() == m.size() && grads.size() == m.size(), "Adam accumulator shape mismatch");
        ++step_count;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
        const double a = lr / c1;
        const double rc2 = 1.0 / std::sqrt(c2);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
            params[i] -= a * m[i] / (std::sqrt(v[i]) * rc2 + epsilon);
        }
    }
};

}  // namespace mdstyle
