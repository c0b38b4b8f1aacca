#include "wnet/optim.hpp"

#include <cmath>

namespace wnet {

template <typename T>
Tensor<T> xavier_init(const std::vector<std::size_t>& shape, std::size_t fan_in,
                      std::size_t fan_out, RngStream& rng, XavierVariant variant) {
    if (fan_in == 0 || fan_out == 0) {
        throw ConfigError("xavier_init: fan_in and fan_out must be positive");
    }
    Tensor<T> out(shape);
    const double fans = static_cast<double>(fan_in + fan_out);
    if (variant == XavierVariant::kUniform) {
        const double limit = std::sqrt(6.0 / fans);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<T>((2.0 * rng.next_uniform() - 1.0) * limit);
        }
    } else {
        const double stddev = std::sqrt(2.0 / fans);
        // Box-Muller on the stream's own uniforms keeps the draw sequence
        // platform-independent. Two uniforms yield two normals; the spare is
        // discarded at an odd tail.
        std::size_t i = 0;
        while (i < out.size()) {
            double u1 = rng.next_uniform();
            while (u1 == 0.0) u1 = rng.next_uniform();
            const double u2 = rng.next_uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
            out[i++] = static_cast<T>(r * std::cos(a) * stddev);
            if (i < out.size()) out[i++] = static_cast<T>(r * std::sin(a) * stddev);
        }
    }
    return out;
}

template <typename T>
void adam_step(Tensor<T>& param, const Tensor<T>& grad, AdamState<T>& state) {
    if (!param.same_shape(grad) || !param.same_shape(state.m) ||
        !param.same_shape(state.v)) {
        throw ShapeError("adam_step: parameter " + shape_string(param.shape()) +
                         ", gradient " + shape_string(grad.shape()) +
                         " and moment shapes must agree");
    }
    state.t += 1;
    const T b1 = static_cast<T>(state.beta1);
    const T b2 = static_cast<T>(state.beta2);
    const T one_minus_b1 = static_cast<T>(1.0 - state.beta1);
    const T one_minus_b2 = static_cast<T>(1.0 - state.beta2);
    const T corr1 = static_cast<T>(
        1.0 - std::pow(state.beta1, static_cast<double>(state.t)));
    const T corr2 = static_cast<T>(
        1.0 - std::pow(state.beta2, static_cast<double>(state.t)));
    const T lr = static_cast<T>(state.learning_rate);
    const T eps = static_cast<T>(state.epsilon);

    T* m = state.m.data();
    T* v = state.v.data();
    T* p = param.data();
    const T* g = grad.data();
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = b1 * m[i] + one_minus_b1 * g[i];
        v[i] = b2 * v[i] + one_minus_b2 * g[i] * g[i];
        const T m_hat = m[i] / corr1;
        const T v_hat = v[i] / corr2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

template <typename T>
void AdamOptimizer<T>::step(std::span<Tensor<T>* const> params,
                            std::span<const Tensor<T>> grads) {
    if (params.size() != grads.size()) {
        throw ShapeError("adam: " + std::to_string(params.size()) +
                         " parameters but " + std::to_string(grads.size()) +
                         " gradients");
    }
    if (states_.empty()) {
        states_.reserve(params.size());
        for (const Tensor<T>* p : params) {
            states_.push_back(AdamState<T>::for_param(*p, learning_rate_, beta1_,
                                                      beta2_, epsilon_));
        }
    }
    if (states_.size() != params.size()) {
        throw StateError("adam: optimizer holds " + std::to_string(states_.size()) +
                         " states but was given " + std::to_string(params.size()) +
                         " parameters");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        adam_step(*params[i], grads[i], states_[i]);
    }
}

template Tensor<float> xavier_init(const std::vector<std::size_t>&, std::size_t,
                                   std::size_t, RngStream&, XavierVariant);
template Tensor<double> xavier_init(const std::vector<std::size_t>&, std::size_t,
                                    std::size_t, RngStream&, XavierVariant);
template void adam_step(Tensor<float>&, const Tensor<float>&, AdamState<float>&);
template void adam_step(Tensor<double>&, const Tensor<double>&, AdamState<double>&);
template class AdamOptimizer<float>;
template class AdamOptimizer<double>;

}  // namespace wnet
