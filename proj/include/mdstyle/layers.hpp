#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdstyle/tensor.hpp"

namespace mdstyle {

/// 3x3 kernel bank, weights laid out [out][in][ky][kx].
struct ConvKernel {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    ConvKernel() = default;
    ConvKernel(std::size_t out, std::size_t in)
        : out_channels(out), in_channels(in), weights(out * in * 9, 0.0), bias(out, 0.0) {}

    double& w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) {
        return weights[((o * in_channels + i) * 3 + ky) * 3 + kx];
    }
};

// 3x3, stride 1, zero padding 1 cross-correlation. Spatial size is preserved.
Tensor conv_forward(const Tensor& input, std::span<const double> weights, std::span<const double> bias,
                    std::size_t out_channels);
Tensor conv_forward(const Tensor& input, const ConvKernel& kernel);

/// Backward pass of conv_forward. `grad_input` may be null; `grad_weights`
/// and `grad_bias` may be empty. Parameter gradients are accumulated.
void conv_backward(const Tensor& input, std::span<const double> weights, std::size_t out_channels,
                   const Tensor& grad_output, Tensor* grad_input, std::span<double> grad_weights,
                   std::span<double> grad_bias);

/// Input gradient only; equivalent to conv_backward with empty parameter spans.
Tensor conv_input_grad(const Shape& input_shape, std::span<const double> weights, std::size_t out_channels,
                       const Tensor& grad_output);

void relu_inplace(Tensor& t) noexcept;
/// Zeroes grad where the ReLU output was not positive.
void relu_backward_inplace(const Tensor& relu_output, Tensor& grad) noexcept;

Tensor avg_pool_forward(const Tensor& in, std::size_t k);
Tensor avg_pool_backward(const Shape& in_shape, const Tensor& grad_out, std::size_t k);

struct MaxPoolResult {
    Tensor output;
    std::vector<std::uint32_t> argmax;  // flat input index per output cell
};
MaxPoolResult max_pool_forward(const Tensor& in, std::size_t k);
Tensor max_pool_backward(const Shape& in_shape, const MaxPoolResult& fwd, const Tensor& grad_out);

/// y = W x + b with W laid out [out][in].
std::vector<double> dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> b,
                                  std::size_t out);
void dense_backward(std::span<const double> x, std::span<const double> w, std::size_t out,
                    std::span<const double> grad_y, std::span<double> grad_x, std::span<double> grad_w,
                    std::span<double> grad_b);

/// Numerically stable softmax (max subtraction).
std::vector<double> softmax(std::span<const double> logits);
/// -log softmax(logits)[label], computed in log space.
double cross_entropy(std::span<const double> logits, std::size_t label);

}  // namespace mdstyle
