#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mdstyle/image.hpp"
#include "mdstyle/layers.hpp"
#include "mdstyle/tensor.hpp"

namespace mdstyle {

inline constexpr std::size_t kNumTaps = 5;
inline constexpr std::array<std::string_view, kNumTaps> kTapNames = {"conv1_1", "conv2_1", "conv3_1", "conv4_1",
                                                                     "conv5_1"};
inline constexpr std::array<std::size_t, kNumTaps> kTapChannels = {8, 16, 32, 64, 64};
inline constexpr std::size_t kMinFeatureInput = 16;

/// Index of a tap name; throws InvalidArgument for unknown names.
std::size_t tap_index(std::string_view name);

/// Post-ReLU feature maps at every tap, in kTapNames order.
struct Activations {
    std::array<Tensor, kNumTaps> taps;

    const Tensor& at(std::string_view name) const { return taps[tap_index(name)]; }
    /// channels x (H*W) view of a tap, row-major; a reshape of the tensor.
    std::vector<double> flattened(std::size_t tap) const {
        auto d = taps[tap].data();
        return {d.begin(), d.end()};
    }
};

/// Fixed random-weight extractor: five conv3x3+ReLU blocks separated by
/// 2x2 average pooling, He-normal weights drawn once from `seed`, zero bias.
class FeatureNetwork {
public:
    explicit FeatureNetwork(std::uint64_t seed = 19);

    std::uint64_t seed() const noexcept { return seed_; }
    const ConvKernel& layer(std::size_t i) const { return layers_.at(i); }
    /// FNV-1a over the raw weight bytes.
    std::uint64_t weight_hash() const noexcept;

    /// Inputs must be single-channel with both sides >= kMinFeatureInput.
    Activations forward(const Tensor& input) const;
    Activations forward(const ImageGrid& img) const { return forward(to_tensor(img)); }

    /// Gradient w.r.t. the input of sum_taps <tap_grads[l], activation[l]>.
    /// `acts` must come from forward(input).
    Tensor backward(const Activations& acts, const std::array<Tensor, kNumTaps>& tap_grads) const;

private:
    std::uint64_t seed_;
    std::vector<ConvKernel> layers_;
};

/// Convenience wrapper matching forward() on an image.
Activations feature_forward(const FeatureNetwork& net, const ImageGrid& img);
/// Runs forward then backward; returns a 1-channel gradient tensor shaped like img.
Tensor feature_backward(const FeatureNetwork& net, const ImageGrid& img,
                        const std::array<Tensor, kNumTaps>& tap_grads);

}  // namespace mdstyle
