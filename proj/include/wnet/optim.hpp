#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wnet/rng.hpp"
#include "wnet/tensor.hpp"

namespace wnet {

enum class XavierVariant { kUniform, kNormal };

/// Xavier (Glorot) initialization. The uniform variant draws i.i.d. from
/// [-L, L] with L = sqrt(6 / (fan_in + fan_out)); the normal variant uses
/// stddev sqrt(2 / (fan_in + fan_out)). Draws come from `rng` in flat element
/// order, computed in double and narrowed to T, so float and double tensors
/// built from the same stream position agree.
template <typename T>
Tensor<T> xavier_init(const std::vector<std::size_t>& shape, std::size_t fan_in,
                      std::size_t fan_out, RngStream& rng,
                      XavierVariant variant = XavierVariant::kUniform);

/// Per-parameter Adam state. m and v follow the parameter's shape and start
/// at zero; t counts completed steps.
template <typename T>
struct AdamState {
    Tensor<T> m;
    Tensor<T> v;
    std::uint64_t t = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_param(const Tensor<T>& param, double learning_rate = 1e-4,
                               double beta1 = 0.9, double beta2 = 0.999,
                               double epsilon = 1e-8) {
        return AdamState{Tensor<T>(param.shape()), Tensor<T>(param.shape()), 0,
                         learning_rate, beta1, beta2, epsilon};
    }
};

/// One Adam update:
///   t <- t+1; m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2
///   param <- param - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename T>
void adam_step(Tensor<T>& param, const Tensor<T>& grad, AdamState<T>& state);

/// Adam applied across a model's parameter list; state i belongs to
/// parameter i and keeps its shape for the life of the optimizer.
template <typename T>
class AdamOptimizer {
public:
    AdamOptimizer(double learning_rate = 1e-4, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-8)
        : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2),
          epsilon_(epsilon) {}

    void step(std::span<Tensor<T>* const> params,
              std::span<const Tensor<T>> grads);

    std::vector<AdamState<T>>& states() { return states_; }
    const std::vector<AdamState<T>>& states() const { return states_; }
    double learning_rate() const { return learning_rate_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double epsilon() const { return epsilon_; }

private:
    double learning_rate_, beta1_, beta2_, epsilon_;
    std::vector<AdamState<T>> states_;
};

}  // namespace wnet
