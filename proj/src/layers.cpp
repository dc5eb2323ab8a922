#include "mdstyle/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdstyle {

namespace {

// cols[(i*9 + ky*3 + kx) * P + y*W + x] = in(i, y+ky-1, x+kx-1), zero outside.
std::vector<double> im2col(const Tensor& in) {
    const std::size_t H = in.height(), W = in.width(), P = H * W;
    std::vector<double> cols(in.channels() * 9 * P, 0.0);
    for (std::size_t i = 0; i < in.channels(); ++i) {
        for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
                double* dst = cols.data() + ((i * 3 + ky) * 3 + kx) * P;
                const std::size_t x_lo = kx == 0 ? 1 : 0;
                const std::size_t x_hi = kx == 2 ? W - 1 : W;
                for (std::size_t y = 0; y < H; ++y) {
                    const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(H)) continue;
                    const double* src = in.data().data() + (i * H + static_cast<std::size_t>(sy)) * W;
                    double* row = dst + y * W;
                    for (std::size_t x = x_lo; x < x_hi; ++x) row[x] = src[x + kx - 1];
                }
            }
        }
    }
    return cols;
}

void col2im_add(std::span<const double> cols, Tensor& out) {
    const std::size_t H = out.height(), W = out.width(), P = H * W;
    for (std::size_t i = 0; i < out.channels(); ++i) {
        for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
                const double* src = cols.data() + ((i * 3 + ky) * 3 + kx) * P;
                const std::size_t x_lo = kx == 0 ? 1 : 0;
                const std::size_t x_hi = kx == 2 ? W - 1 : W;
                for (std::size_t y = 0; y < H; ++y) {
                    const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(H)) continue;
                    double* dst = &out(i, static_cast<std::size_t>(sy), 0);
                    const double* row = src + y * W;
                    for (std::size_t x = x_lo; x < x_hi; ++x) dst[x + kx - 1] += row[x];
                }
            }
        }
    }
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) noexcept {
#pragma omp simd
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

Tensor conv_forward(const Tensor& input, std::span<const double> weights, std::span<const double> bias,
                    std::size_t out_channels) {
    const std::size_t K = input.channels() * 9;
    if (weights.size() != out_channels * K || bias.size() != out_channels)
        throw InvalidArgument("conv kernel shape does not match input channels");
    const std::size_t P = input.height() * input.width();
    const auto cols = im2col(input);
    Tensor out(out_channels, input.height(), input.width());
    for (std::size_t o = 0; o < out_channels; ++o) {
        double* dst = out.data().data() + o * P;
        std::fill(dst, dst + P, bias[o]);
        for (std::size_t k = 0; k < K; ++k) {
            const double w = weights[o * K + k];
            if (w != 0.0) axpy(w, cols.data() + k * P, dst, P);
        }
    }
    return out;
}

Tensor conv_forward(const Tensor& input, const ConvKernel& kernel) {
    if (kernel.in_channels != input.channels())
        throw InvalidArgument("conv kernel input channels do not match the input tensor");
    return conv_forward(input, kernel.weights, kernel.bias, kernel.out_channels);
}

void conv_backward(const Tensor& input, std::span<const double> weights, std::size_t out_channels,
                   const Tensor& grad_output, Tensor* grad_input, std::span<double> grad_weights,
                   std::span<double> grad_bias) {
    const std::size_t K = input.channels() * 9;
    const std::size_t P = input.height() * input.width();
    if (weights.size() != out_channels * K) throw InvalidArgument("conv kernel shape mismatch");
    if (grad_output.shape() != Shape{out_channels, input.height(), input.width()})
        throw InvalidArgument("conv output gradient shape mismatch");

    const double* g = grad_output.data().data();
    if (!grad_bias.empty()) {
        for (std::size_t o = 0; o < out_channels; ++o) {
            double s = 0.0;
            for (std::size_t p = 0; p < P; ++p) s += g[o * P + p];
            grad_bias[o] += s;
        }
    }
    if (!grad_weights.empty()) {
        const auto cols = im2col(input);
        for (std::size_t o = 0; o < out_channels; ++o)
            for (std::size_t k = 0; k < K; ++k) grad_weights[o * K + k] += dot(g + o * P, cols.data() + k * P, P);
    }
    if (grad_input != nullptr) *grad_input = conv_input_grad(input.shape(), weights, out_channels, grad_output);
}

Tensor conv_input_grad(const Shape& input_shape, std::span<const double> weights, std::size_t out_channels,
                       const Tensor& grad_output) {
    const std::size_t K = input_shape.channels * 9;
    const std::size_t P = input_shape.plane();
    if (weights.size() != out_channels * K) throw InvalidArgument("conv kernel shape mismatch");
    if (grad_output.shape() != Shape{out_channels, input_shape.height, input_shape.width})
        throw InvalidArgument("conv output gradient shape mismatch");
    const double* g = grad_output.data().data();
    std::vector<double> gcols(K * P, 0.0);
    for (std::size_t o = 0; o < out_channels; ++o)
        for (std::size_t k = 0; k < K; ++k) {
            const double w = weights[o * K + k];
            if (w != 0.0) axpy(w, g + o * P, gcols.data() + k * P, P);
        }
    Tensor out(input_shape);
    col2im_add(gcols, out);
    return out;
}

void relu_inplace(Tensor& t) noexcept {
    for (auto& v : t.data()) v = v > 0.0 ? v : 0.0;
}

void relu_backward_inplace(const Tensor& relu_output, Tensor& grad) noexcept {
    auto out = relu_output.data();
    auto g = grad.data();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!(out[i] > 0.0)) g[i] = 0.0;
}

Tensor avg_pool_forward(const Tensor& in, std::size_t k) {
    require(k >= 1 && in.height() >= k && in.width() >= k, "pooling window larger than input");
    Tensor out(in.channels(), in.height() / k, in.width() / k);
    const double inv = 1.0 / static_cast<double>(k * k);
    for (std::size_t c = 0; c < out.channels(); ++c)
        for (std::size_t y = 0; y < out.height(); ++y)
            for (std::size_t x = 0; x < out.width(); ++x) {
                double s = 0.0;
                for (std::size_t dy = 0; dy < k; ++dy)
                    for (std::size_t dx = 0; dx < k; ++dx) s += in(c, y * k + dy, x * k + dx);
                out(c, y, x) = s * inv;
            }
    return out;
}

Tensor avg_pool_backward(const Shape& in_shape, const Tensor& grad_out, std::size_t k) {
    Tensor g(in_shape);
    const double inv = 1.0 / static_cast<double>(k * k);
    for (std::size_t c = 0; c < grad_out.channels(); ++c)
        for (std::size_t y = 0; y < grad_out.height(); ++y)
            for (std::size_t x = 0; x < grad_out.width(); ++x) {
                const double v = grad_out(c, y, x) * inv;
                for (std::size_t dy = 0; dy < k; ++dy)
                    for (std::size_t dx = 0; dx < k; ++dx) g(c, y * k + dy, x * k + dx) = v;
            }
    return g;
}

MaxPoolResult max_pool_forward(const Tensor& in, std::size_t k) {
    require(k >= 1 && in.height() >= k && in.width() >= k, "pooling window larger than input");
    MaxPoolResult r{Tensor(in.channels(), in.height() / k, in.width() / k), {}};
    r.argmax.resize(r.output.size());
    std::size_t n = 0;
    for (std::size_t c = 0; c < r.output.channels(); ++c)
        for (std::size_t y = 0; y < r.output.height(); ++y)
            for (std::size_t x = 0; x < r.output.width(); ++x, ++n) {
                double best = -std::numeric_limits<double>::infinity();
                std::size_t arg = 0;
                for (std::size_t dy = 0; dy < k; ++dy)
                    for (std::size_t dx = 0; dx < k; ++dx) {
                        const std::size_t idx = (c * in.height() + y * k + dy) * in.width() + x * k + dx;
                        if (in[idx] > best) {
                            best = in[idx];
                            arg = idx;
                        }
                    }
                r.output[n] = best;
                r.argmax[n] = static_cast<std::uint32_t>(arg);
            }
    return r;
}

Tensor max_pool_backward(const Shape& in_shape, const MaxPoolResult& fwd, const Tensor& grad_out) {
    Tensor g(in_shape);
    for (std::size_t n = 0; n < grad_out.size(); ++n) g[fwd.argmax[n]] += grad_out[n];
    return g;
}

std::vector<double> dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> b,
                                  std::size_t out) {
    if (w.size() != out * x.size() || b.size() != out) throw InvalidArgument("dense layer shape mismatch");
    std::vector<double> y(out);
    for (std::size_t o = 0; o < out; ++o) y[o] = b[o] + dot(w.data() + o * x.size(), x.data(), x.size());
    return y;
}

void dense_backward(std::span<const double> x, std::span<const double> w, std::size_t out,
                    std::span<const double> grad_y, std::span<double> grad_x, std::span<double> grad_w,
                    std::span<double> grad_b) {
    const std::size_t n = x.size();
    for (std::size_t o = 0; o < out; ++o) {
        const double g = grad_y[o];
        if (!grad_b.empty()) grad_b[o] += g;
        if (!grad_w.empty()) axpy(g, x.data(), grad_w.data() + o * n, n);
        if (!grad_x.empty()) axpy(g, w.data() + o * n, grad_x.data(), n);
    }
}

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logits[i] - m));
    for (auto& v : p) v /= z;
    return p;
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - m);
    return -(logits[label] - m - std::log(z));
}

}  // namespace mdstyle
