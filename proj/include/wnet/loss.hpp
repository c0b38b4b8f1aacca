#pragma once

#include <span>

#include "wnet/tensor.hpp"

namespace wnet {

/// Row-wise softmax computed with max subtraction; rows sum to 1.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& logits);

template <typename T>
struct SoftmaxXentResult {
    T loss;                 // mean negative log-likelihood over the batch
    Tensor<T> grad_logits;  // (softmax - onehot) / n
};

/// Mean softmax cross-entropy over a [n, classes] logit batch, evaluated via
/// log-sum-exp so arbitrarily large logits cannot overflow.
template <typename T>
SoftmaxXentResult<T> softmax_cross_entropy(const Tensor<T>& logits,
                                           std::span<const int> labels);

}  // namespace wnet
