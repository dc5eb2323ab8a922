#pragma once

#include <algorithm>
#include <cmath>

#include "mdstyle/style_transfer.hpp"

namespace testing {

struct GradCheck {
    double worst = 0.0;        // central differences inside one ReLU region, one-sided next to a kink
    double worst_raw = 0.0;    // central differences everywhere
    std::size_t kinks = 0;     // coordinates where x + h or x - h flips some ReLU
    std::size_t unresolved = 0;  // both sides flip, so no difference at this h is valid
    std::size_t checked = 0;
};

inline bool same_relu_pattern(const mdstyle::Activations& a, const mdstyle::Activations& b) {
    for (std::size_t l = 0; l < mdstyle::kNumTaps; ++l)
        for (std::size_t i = 0; i < a.taps[l].size(); ++i)
            if ((a.taps[l][i] > 0.0) != (b.taps[l][i] > 0.0)) return false;
    return true;
}

// Central differences of `loss` (a function of the candidate pixels) at x.
// The objective is only piecewise smooth: when one side of the step crosses
// a ReLU boundary the other side's one-sided difference is used instead.
template <typename Loss>
GradCheck check_pixel_gradient(const mdstyle::FeatureNetwork& net, mdstyle::Tensor x, const mdstyle::Tensor& analytic,
                               Loss loss, double h = 1e-4) {
    GradCheck out;
    double gmax = 0.0;
    for (double v : analytic.data()) gmax = std::max(gmax, std::abs(v));
    const double floor = std::max(1e-3 * gmax, 1e-12);
    const auto base = net.forward(x);
    const double at = loss(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = loss(x);
        const bool smooth_up = same_relu_pattern(base, net.forward(x));
        x[i] = keep - h;
        const double down = loss(x);
        const bool smooth_down = same_relu_pattern(base, net.forward(x));
        x[i] = keep;
        const double num = (up - down) / (2 * h);
        auto rel = [&](double d) {
            return std::abs(d - analytic[i]) / std::max({std::abs(d), std::abs(analytic[i]), floor});
        };
        // Second-order one-sided stencil when x +- 2h stays in the same region.
        auto one_sided = [&](double sign, double near) {
            x[i] = keep + 2 * sign * h;
            const double far = loss(x);
            const bool smooth_far = same_relu_pattern(base, net.forward(x));
            x[i] = keep;
            return smooth_far ? sign * (-3 * at + 4 * near - far) / (2 * h) : sign * (near - at) / h;
        };
        out.worst_raw = std::max(out.worst_raw, rel(num));
        if (!(smooth_up && smooth_down)) ++out.kinks;
        if (smooth_up && smooth_down) out.worst = std::max(out.worst, rel(num));
        else if (smooth_up) out.worst = std::max(out.worst, rel(one_sided(1.0, up)));
        else if (smooth_down) out.worst = std::max(out.worst, rel(one_sided(-1.0, down)));
        else {
            ++out.unresolved;
            continue;
        }
        ++out.checked;
    }
    return out;
}

}  // namespace testing
