#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mdstyle/feature_net.hpp"
#include "mdstyle/image.hpp"

namespace mdstyle {

/// Symmetric N x N feature-correlation matrix, row-major.
struct GramMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
};

/// G[i][j] = sum_k F[i][k] F[j][k] over the channels x (H*W) flattening.
GramMatrix gram(const Tensor& t);

/// Loss value plus its gradient w.r.t. each tap activation. Taps that do
/// not contribute carry an empty tensor.
struct TapLoss {
    double value = 0.0;
    std::array<Tensor, kNumTaps> grads;
};

/// (1/(M N O)) sum (transfer - content)^2 over each listed tap.
TapLoss content_loss(const Activations& transfer, const Activations& content, const std::vector<std::string>& layers);

/// Precomputed style targets, one Gram matrix per tap (empty if unused).
struct StyleTargets {
    std::array<GramMatrix, kNumTaps> grams;
};
StyleTargets style_targets(const Activations& style, const std::vector<std::string>& layers);

/// sum_l W_l (1/(M N O)) sum (G_style - G_transfer)^2 with gradient
/// (4 W_l / (M N O)) (G_transfer - G_style) F at each tap.
TapLoss style_loss(const Activations& transfer, const StyleTargets& style, const std::vector<std::string>& layers,
                   const std::map<std::string, double>& weights);
TapLoss style_loss(const Activations& transfer, const Activations& style, const std::vector<std::string>& layers,
                   const std::map<std::string, double>& weights);

struct LossBreakdown {
    double content = 0.0;
    double style = 0.0;
    double total = 0.0;
};

/// alpha * content + beta * style. Throws on negative weights or parts.
LossBreakdown total_loss(double content, double style, double alpha, double beta);

enum class InitMode { white_noise, content_copy };

struct StyleTransferConfig {
    double alpha = 1e-3;
    double beta = 1.0;
    std::map<std::string, double> style_layer_weights = {
        {"conv1_1", 0.2}, {"conv2_1", 0.2}, {"conv3_1", 0.2}, {"conv4_1", 0.2}, {"conv5_1", 0.2}};
    std::vector<std::string> content_layers = {"conv2_1"};
    std::vector<std::string> style_layers = {"conv1_1", "conv2_1", "conv3_1", "conv4_1", "conv5_1"};
    int iterations = 2500;
    double step_size = 0.02;
    InitMode init = InitMode::white_noise;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TransferResult {
    ImageGrid output;
    std::vector<LossBreakdown> trace;  // loss of the iterate before each step
};

/// Total loss and its pixel gradient for a candidate image; the building
/// block of transfer(), exposed for gradient checks.
struct Objective {
    LossBreakdown loss;
    Tensor pixel_grad;
};

class StyleObjective {
public:
    StyleObjective(const FeatureNetwork& net, const Tensor& content, const Tensor& style, const StyleTransferConfig& cfg);
    Objective evaluate(const Tensor& candidate) const;

private:
    const FeatureNetwork& net_;
    StyleTransferConfig cfg_;
    Activations content_acts_;
    StyleTargets style_;
};

/// Adam on the pixels of the transfer image, clamped to [0,1] after each step.
TransferResult transfer(const ImageGrid& content, const ImageGrid& style, const FeatureNetwork& net,
                        const StyleTransferConfig& cfg);

/// Seed used for the i-th image of batch_stylize.
std::uint64_t batch_item_seed(std::uint64_t base_seed, std::size_t index);

struct StyledItem {
    int activity_id;
    ImageGrid image;
};

/// Stylizes every clean image against the exemplar of its activity.
/// Image i uses seed batch_item_seed(cfg.seed, i).
std::vector<StyledItem> batch_stylize(const std::vector<StyledItem>& clean, const std::map<int, ImageGrid>& exemplars,
                                      const FeatureNetwork& net, const StyleTransferConfig& cfg);

/// Normalised cross-correlation of two equally sized images.
double normalized_cross_correlation(const ImageGrid& a, const ImageGrid& b);

}  // namespace mdstyle
