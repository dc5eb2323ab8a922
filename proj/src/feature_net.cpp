#include "mdstyle/feature_net.hpp"

#include <cmath>
#include <cstring>
#include <random>

namespace mdstyle {

std::size_t tap_index(std::string_view name) {
    for (std::size_t i = 0; i < kNumTaps; ++i)
        if (kTapNames[i] == name) return i;
    throw InvalidArgument("unknown feature tap '" + std::string(name) + "'");
}

FeatureNetwork::FeatureNetwork(std::uint64_t seed) : seed_(seed) {
    std::mt19937_64 rng(derive_seed(seed, "feature-network"));
    std::size_t in = 1;
    for (std::size_t l = 0; l < kNumTaps; ++l) {
        ConvKernel k(kTapChannels[l], in);
        std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / static_cast<double>(in * 9)));
        for (auto& w : k.weights) w = nd(rng);
        layers_.push_back(std::move(k));
        in = kTapChannels[l];
    }
}

std::uint64_t FeatureNetwork::weight_hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& l : layers_) {
        for (double w : l.weights) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &w, sizeof w);
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

Activations FeatureNetwork::forward(const Tensor& input) const {
    if (input.channels() != 1) throw InvalidArgument("feature network expects a single-channel input");
    if (input.height() < kMinFeatureInput || input.width() < kMinFeatureInput)
        throw InvalidArgument("feature network input must be at least 16x16");
    Activations acts;
    for (std::size_t l = 0; l < kNumTaps; ++l) {
        Tensor a = conv_forward(l == 0 ? input : avg_pool_forward(acts.taps[l - 1], 2), layers_[l]);
        relu_inplace(a);
        acts.taps[l] = std::move(a);
    }
    return acts;
}

Tensor FeatureNetwork::backward(const Activations& acts, const std::array<Tensor, kNumTaps>& tap_grads) const {
    for (std::size_t l = 0; l < kNumTaps; ++l)
        if (tap_grads[l].shape() != acts.taps[l].shape())
            throw InvalidArgument("tap gradient shape mismatch at " + std::string(kTapNames[l]));

    Tensor upstream;  // gradient w.r.t. the pooled input of layer l+1
    Tensor grad_input;
    for (std::size_t l = kNumTaps; l-- > 0;) {
        Tensor g = tap_grads[l];
        if (l + 1 < kNumTaps) {
            const Tensor back = avg_pool_backward(acts.taps[l].shape(), upstream, 2);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += back[i];
        }
        relu_backward_inplace(acts.taps[l], g);
        const Shape in_shape = l == 0 ? Shape{1, acts.taps[0].height(), acts.taps[0].width()}
                                      : Shape{kTapChannels[l - 1], acts.taps[l].height(), acts.taps[l].width()};
        Tensor gx = conv_input_grad(in_shape, layers_[l].weights, layers_[l].out_channels, g);
        if (l == 0) grad_input = std::move(gx);
        else upstream = std::move(gx);
    }
    return grad_input;
}

Activations feature_forward(const FeatureNetwork& net, const ImageGrid& img) { return net.forward(img); }

Tensor feature_backward(const FeatureNetwork& net, const ImageGrid& img, const std::array<Tensor, kNumTaps>& tap_grads) {
    const Tensor x = to_tensor(img);
    return net.backward(net.forward(x), tap_grads);
}

}  // namespace mdstyle
