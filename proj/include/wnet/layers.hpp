#pragma once

#include <optional>
#include <vector>

#include "wnet/rng.hpp"
#include "wnet/tensor.hpp"

namespace wnet {

enum class Padding { kSame, kValid };

/// 2-D convolution over NCHW tensors. Weights are [out_ch, in_ch, kh, kw],
/// bias is [out_ch]. SAME padding zero-pads (k-1)/2 on each side so stride-1
/// output keeps the input's spatial dims.
template <typename T>
class Conv2d {
public:
    Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
           std::size_t stride = 1, Padding padding = Padding::kSame);

    Tensor<T> forward(const Tensor<T>& x) const;

    struct Grads {
        Tensor<T> input;
        Tensor<T> weights;
        Tensor<T> bias;
    };
    /// Gradients of sum(grad_out * forward(x)) w.r.t. x, weights and bias.
    Grads backward(const Tensor<T>& x, const Tensor<T>& grad_out) const;

    std::size_t in_channels() const { return in_channels_; }
    std::size_t out_channels() const { return out_channels_; }
    std::size_t kernel() const { return kernel_; }
    std::size_t stride() const { return stride_; }
    Padding padding() const { return padding_; }
    std::size_t parameter_count() const { return weights.size() + bias.size(); }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const;

    Tensor<T> weights;
    Tensor<T> bias;

private:
    std::size_t in_channels_, out_channels_, kernel_, stride_;
    Padding padding_;
    std::size_t pad_amount() const {
        return padding_ == Padding::kSame ? (kernel_ - 1) / 2 : 0;
    }
};

/// Max pooling over NCHW tensors. With SAME padding the output spatial dims
/// are ceil(in/stride); window cells that fall outside the input are excluded
/// from the max, never made winners. The forward pass reports each output's
/// winning input position (flat index, ties to the lowest) through `argmax`,
/// and the backward pass routes gradient mass only to those winners.
template <typename T>
class MaxPool2d {
public:
    MaxPool2d(std::size_t window = 2, std::size_t stride = 2,
              Padding padding = Padding::kSame);

    Tensor<T> forward(const Tensor<T>& x,
                      std::vector<std::size_t>* argmax = nullptr) const;

    Tensor<T> backward(const Tensor<T>& grad_out,
                       const std::vector<std::size_t>& argmax,
                       const std::vector<std::size_t>& input_shape) const;

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const;

    std::size_t window() const { return window_; }
    std::size_t stride() const { return stride_; }

private:
    std::size_t window_, stride_;
    Padding padding_;
};

/// Inverted dropout: at train time each element is kept with probability
/// keep_prob and scaled by 1/keep_prob, so inference is exactly the identity.
template <typename T>
class Dropout {
public:
    explicit Dropout(double keep_prob);

    /// Train-time forward; draws one uniform per element from `rng` in flat
    /// order and writes the applied mask to `mask_out`. keep_prob == 1 skips
    /// the draws and passes the input through unchanged.
    Tensor<T> forward_train(const Tensor<T>& x, RngStream& rng,
                            Tensor<T>* mask_out) const;

    /// Inference is the identity.
    const Tensor<T>& forward_infer(const Tensor<T>& x) const { return x; }

    Tensor<T> backward(const Tensor<T>& grad_out, const Tensor<T>& mask) const;

    double keep_prob() const { return keep_prob_; }

private:
    double keep_prob_;
};

/// Fully connected layer: out = x . W + b with W [in_units, out_units].
template <typename T>
class Dense {
public:
    Dense(std::size_t in_units, std::size_t out_units);

    Tensor<T> forward(const Tensor<T>& x) const;

    struct Grads {
        Tensor<T> input;
        Tensor<T> weights;
        Tensor<T> bias;
    };
    Grads backward(const Tensor<T>& x, const Tensor<T>& grad_out) const;

    std::size_t in_units() const { return in_units_; }
    std::size_t out_units() const { return out_units_; }
    std::size_t parameter_count() const { return weights.size() + bias.size(); }

    Tensor<T> weights;
    Tensor<T> bias;

private:
    std::size_t in_units_, out_units_;
};

/// out[i] = max(0, x[i]).
template <typename T>
Tensor<T> relu(const Tensor<T>& x);

/// grad_x[i] = grad_out[i] if x[i] > 0 else 0 (subgradient 0 at exactly 0).
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out);

/// [n,c,h,w] -> [n, c*h*w], preserving the per-sample row-major sequence.
template <typename T>
Tensor<T> flatten(const Tensor<T>& x);

}  // namespace wnet
