#include "mdstyle/style_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mdstyle/adam.hpp"

namespace mdstyle {

namespace {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

std::vector<std::size_t> resolve(const std::vector<std::string>& layers) {
    std::vector<std::size_t> idx;
    for (const auto& name : layers) idx.push_back(tap_index(name));
    return idx;
}

}  // namespace

GramMatrix gram(const Tensor& t) {
    const std::size_t n = t.channels();
    const std::size_t d = t.height() * t.width();
    GramMatrix g{n, std::vector<double>(n * n, 0.0)};
    const double* f = t.data().data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) g.values[i * n + j] = g.values[j * n + i] = dot(f + i * d, f + j * d, d);
    return g;
}

TapLoss content_loss(const Activations& transfer, const Activations& content, const std::vector<std::string>& layers) {
    TapLoss out;
    for (std::size_t l : resolve(layers)) {
        const Tensor& a = transfer.taps[l];
        const Tensor& c = content.taps[l];
        if (a.shape() != c.shape()) throw InvalidArgument("content activation shape mismatch");
        const double inv = 1.0 / static_cast<double>(a.size());
        Tensor g(a.shape());
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - c[i];
            sum += diff * diff;
            g[i] = 2.0 * inv * diff;
        }
        out.value += inv * sum;
        if (out.grads[l].size() == 0) out.grads[l] = std::move(g);
        else for (std::size_t i = 0; i < g.size(); ++i) out.grads[l][i] += g[i];
    }
    return out;
}

StyleTargets style_targets(const Activations& style, const std::vector<std::string>& layers) {
    StyleTargets t;
    for (std::size_t l : resolve(layers)) t.grams[l] = gram(style.taps[l]);
    return t;
}

TapLoss style_loss(const Activations& transfer, const StyleTargets& style, const std::vector<std::string>& layers,
                   const std::map<std::string, double>& weights) {
    TapLoss out;
    for (const auto& name : layers) {
        const std::size_t l = tap_index(name);
        const auto w_it = weights.find(name);
        if (w_it == weights.end()) throw InvalidArgument("no style weight for layer " + name);
        const double w = w_it->second;
        const Tensor& f = transfer.taps[l];
        const GramMatrix& target = style.grams[l];
        if (target.n != f.channels()) throw InvalidArgument("style activation shape mismatch at " + name);

        const GramMatrix g = gram(f);
        const std::size_t n = g.n;
        const std::size_t d = f.height() * f.width();
        const double inv = 1.0 / static_cast<double>(f.size());
        std::vector<double> diff(n * n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n * n; ++i) {
            diff[i] = g.values[i] - target.values[i];
            sum += diff[i] * diff[i];
        }
        out.value += w * inv * sum;

        Tensor grad(f.shape());
        const double coef = 4.0 * w * inv;
        const double* fd = f.data().data();
        double* gd = grad.data().data();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double c = coef * diff[i * n + j];
                if (c == 0.0) continue;
#pragma omp simd
                for (std::size_t k = 0; k < d; ++k) gd[i * d + k] += c * fd[j * d + k];
            }
        if (out.grads[l].size() == 0) out.grads[l] = std::move(grad);
        else for (std::size_t i = 0; i < grad.size(); ++i) out.grads[l][i] += grad[i];
    }
    return out;
}

TapLoss style_loss(const Activations& transfer, const Activations& style, const std::vector<std::string>& layers,
                   const std::map<std::string, double>& weights) {
    for (const auto& name : layers) {
        const std::size_t l = tap_index(name);
        if (transfer.taps[l].shape() != style.taps[l].shape())
            throw InvalidArgument("style activation shape mismatch at " + name);
    }
    return style_loss(transfer, style_targets(style, layers), layers, weights);
}

LossBreakdown total_loss(double content, double style, double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0) throw InvalidArgument("loss weights must be non-negative");
    require(content >= 0.0 && style >= 0.0, "loss parts must be non-negative");
    return {content, style, alpha * content + beta * style};
}

void StyleTransferConfig::validate() const {
    require(alpha > 0.0 && beta > 0.0, "alpha and beta must be positive");
    require(iterations >= 1, "iterations must be >= 1");
    require(step_size > 0.0, "step size must be positive");
    require(!content_layers.empty() && !style_layers.empty(), "content and style layers must be non-empty");
    double wsum = 0.0;
    for (const auto& name : style_layers) {
        tap_index(name);
        const auto it = style_layer_weights.find(name);
        require(it != style_layer_weights.end() && it->second >= 0.0, "every style layer needs a weight >= 0");
        wsum += it->second;
    }
    require(std::abs(wsum - 1.0) < 1e-9, "style layer weights must sum to 1");
    for (const auto& name : content_layers) tap_index(name);
}

StyleObjective::StyleObjective(const FeatureNetwork& net, const Tensor& content, const Tensor& style,
                               const StyleTransferConfig& cfg)
    : net_(net), cfg_(cfg), content_acts_(net.forward(content)), style_(style_targets(net.forward(style), cfg.style_layers)) {
    if (content.shape() != style.shape()) throw InvalidArgument("content and style dimensions differ");
}

Objective StyleObjective::evaluate(const Tensor& candidate) const {
    const Activations acts = net_.forward(candidate);
    TapLoss c = content_loss(acts, content_acts_, cfg_.content_layers);
    TapLoss s = style_loss(acts, style_, cfg_.style_layers, cfg_.style_layer_weights);

    std::array<Tensor, kNumTaps> grads;
    for (std::size_t l = 0; l < kNumTaps; ++l) {
        Tensor g(acts.taps[l].shape());
        if (c.grads[l].size() != 0)
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += cfg_.alpha * c.grads[l][i];
        if (s.grads[l].size() != 0)
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += cfg_.beta * s.grads[l][i];
        grads[l] = std::move(g);
    }
    return {total_loss(c.value, s.value, cfg_.alpha, cfg_.beta), net_.backward(acts, grads)};
}

TransferResult transfer(const ImageGrid& content, const ImageGrid& style, const FeatureNetwork& net,
                        const StyleTransferConfig& cfg) {
    cfg.validate();
    if (content.rows() != style.rows() || content.cols() != style.cols())
        throw InvalidArgument("content and style dimensions differ");
    const Tensor c = to_tensor(content);
    const StyleObjective objective(net, c, to_tensor(style), cfg);

    Tensor x = c;
    if (cfg.init == InitMode::white_noise) {
        std::mt19937_64 rng(derive_seed(cfg.seed, "transfer-init"));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& v : x.data()) v = u(rng);
    }

    AdamState adam(x.size(), cfg.step_size);
    TransferResult result;
    result.trace.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        const Objective obj = objective.evaluate(x);
        result.trace.push_back(obj.loss);
        adam.step(x.data(), obj.pixel_grad.data());
        for (auto& v : x.data()) v = std::clamp(v, 0.0, 1.0);
    }
    result.output = to_image(x);
    return result;
}

std::uint64_t batch_item_seed(std::uint64_t base_seed, std::size_t index) {
    return derive_seed(derive_seed(base_seed, "batch-stylize"), index);
}

std::vector<StyledItem> batch_stylize(const std::vector<StyledItem>& clean, const std::map<int, ImageGrid>& exemplars,
                                      const FeatureNetwork& net, const StyleTransferConfig& cfg) {
    for (const auto& item : clean)
        if (!exemplars.contains(item.activity_id))
            throw InvalidArgument("missing style exemplar for activity " + std::to_string(item.activity_id));
    std::vector<StyledItem> out;
    out.reserve(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) {
        StyleTransferConfig item_cfg = cfg;
        item_cfg.seed = batch_item_seed(cfg.seed, i);
        out.push_back({clean[i].activity_id,
                       transfer(clean[i].image, exemplars.at(clean[i].activity_id), net, item_cfg).output});
    }
    return out;
}

double normalized_cross_correlation(const ImageGrid& a, const ImageGrid& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "NCC needs equally sized images");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a.pixels()[i];
        mb += b.pixels()[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.pixels()[i] - ma, db = b.pixels()[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace mdstyle
