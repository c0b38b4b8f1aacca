#include "wnet/loss.hpp"

#include <cmath>

namespace wnet {

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& logits) {
    if (logits.rank() != 2 || logits.dim(1) == 0) {
        throw ShapeError("softmax: expected nonempty rank-2 logits, got " +
                         shape_string(logits.shape()));
    }
    const std::size_t n = logits.dim(0), c = logits.dim(1);
    Tensor<T> probs(logits.shape());
    for (std::size_t i = 0; i < n; ++i) {
        T max_logit = logits(i, 0);
        for (std::size_t j = 1; j < c; ++j) max_logit = std::max(max_logit, logits(i, j));
        T denom{};
        for (std::size_t j = 0; j < c; ++j) {
            const T e = std::exp(logits(i, j) - max_logit);
            probs(i, j) = e;
            denom += e;
        }
        for (std::size_t j = 0; j < c; ++j) probs(i, j) /= denom;
    }
    return probs;
}

template <typename T>
SoftmaxXentResult<T> softmax_cross_entropy(const Tensor<T>& logits,
                                           std::span<const int> labels) {
    if (logits.rank() != 2 || logits.dim(1) == 0) {
        throw ShapeError("softmax_cross_entropy: expected rank-2 logits, got " +
                         shape_string(logits.shape()));
    }
    const std::size_t n = logits.dim(0), c = logits.dim(1);
    if (labels.size() != n) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(n) +
                         " rows but " + std::to_string(labels.size()) + " labels");
    }
    if (n == 0) {
        throw ShapeError("softmax_cross_entropy: empty batch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
            throw ShapeError("softmax_cross_entropy: label " +
                             std::to_string(labels[i]) + " outside [0, " +
                             std::to_string(c) + ")");
        }
    }

    SoftmaxXentResult<T> res;
    res.grad_logits = softmax_rows(logits);
    const T inv_n = static_cast<T>(1) / static_cast<T>(n);
    T loss{};
    for (std::size_t i = 0; i < n; ++i) {
        // log softmax of the true class, recomputed via log-sum-exp.
        T max_logit = logits(i, 0);
        for (std::size_t j = 1; j < c; ++j) max_logit = std::max(max_logit, logits(i, j));
        T sum_exp{};
        for (std::size_t j = 0; j < c; ++j) sum_exp += std::exp(logits(i, j) - max_logit);
        const T log_p = logits(i, static_cast<std::size_t>(labels[i])) - max_logit -
                        std::log(sum_exp);
        loss -= log_p;
        for (std::size_t j = 0; j < c; ++j) res.grad_logits(i, j) *= inv_n;
        res.grad_logits(i, static_cast<std::size_t>(labels[i])) -= inv_n;
    }
    res.loss = loss * inv_n;
    return res;
}

template Tensor<float> softmax_rows(const Tensor<float>&);
template Tensor<double> softmax_rows(const Tensor<double>&);
template SoftmaxXentResult<float> softmax_cross_entropy(const Tensor<float>&,
                                                        std::span<const int>);
template SoftmaxXentResult<double> softmax_cross_entropy(const Tensor<double>&,
                                                         std::span<const int>);

}  // namespace wnet
