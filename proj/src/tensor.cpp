#include "wnet/tensor.hpp"

namespace wnet {

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

namespace {

template <typename T>
void check_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    }
}

}  // namespace

template <typename T>
void matmul_accumulate(Tensor<T>& c, const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul: expected rank-2 operands, got " +
                         shape_string(a.shape()) + " and " + shape_string(b.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (b.dim(0) != k) {
        throw ShapeError("matmul: inner dimensions differ, " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    }
    if (c.rank() != 2 || c.dim(0) != m || c.dim(1) != n) {
        throw ShapeError("matmul: output shape " + shape_string(c.shape()) +
                         " does not match [" + std::to_string(m) + "," +
                         std::to_string(n) + "]");
    }
    const T* pa = a.data();
    const T* pb = b.data();
    T* pc = c.data();
    // i-k-j loop order: per output element the k contributions arrive in
    // ascending order, and rows are independent so they may run in parallel
    // without changing any bit of the result.
    const bool big = m * k * n >= (std::size_t{1} << 20);
#pragma omp parallel for schedule(static) if (big)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        T* crow = pc + static_cast<std::size_t>(i) * n;
        const T* arow = pa + static_cast<std::size_t>(i) * k;
        for (std::size_t t = 0; t < k; ++t) {
            const T av = arow[t];
            const T* brow = pb + t * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul: expected rank-2 operands, got " +
                         shape_string(a.shape()) + " and " + shape_string(b.shape()));
    }
    if (a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: inner dimensions differ, " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    }
    Tensor<T> c({a.dim(0), b.dim(1)}, T{});
    matmul_accumulate(c, a, b);
    return c;
}

template <typename T>
Tensor<T> transposed(const Tensor<T>& t) {
    if (t.rank() != 2) {
        throw ShapeError("transpose: expected rank-2 tensor, got " +
                         shape_string(t.shape()));
    }
    const std::size_t m = t.dim(0), n = t.dim(1);
    Tensor<T> out({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(j, i) = t(i, j);
    return out;
}

template <typename T>
std::vector<std::size_t> argmax_last_axis(const Tensor<T>& t) {
    if (t.rank() != 2) {
        throw ShapeError("argmax_last_axis: expected rank-2 tensor, got " +
                         shape_string(t.shape()));
    }
    const std::size_t n = t.dim(0), c = t.dim(1);
    if (c == 0) throw ShapeError("argmax_last_axis: empty last axis");
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < c; ++j) {
            if (t(i, j) > t(i, best)) best = j;  // ties keep the lowest index
        }
        out[i] = best;
    }
    return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    check_same_shape(a, b, "add");
    Tensor<T> out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

template <typename T>
Tensor<T> hadamard(const Tensor<T>& a, const Tensor<T>& b) {
    check_same_shape(a, b, "hadamard");
    Tensor<T> out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    Tensor<T> out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
    return out;
}

template void matmul_accumulate(Tensor<float>&, const Tensor<float>&, const Tensor<float>&);
template void matmul_accumulate(Tensor<double>&, const Tensor<double>&, const Tensor<double>&);
template Tensor<float> matmul(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> matmul(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> transposed(const Tensor<float>&);
template Tensor<double> transposed(const Tensor<double>&);
template std::vector<std::size_t> argmax_last_axis(const Tensor<float>&);
template std::vector<std::size_t> argmax_last_axis(const Tensor<double>&);
template Tensor<float> add(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> add(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> hadamard(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> hadamard(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> scale(const Tensor<float>&, float);
template Tensor<double> scale(const Tensor<double>&, double);

}  // namespace wnet
