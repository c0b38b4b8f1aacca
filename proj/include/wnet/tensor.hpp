#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wnet/errors.hpp"

namespace wnet {

/// Element precision tag; used where tensors cross a serialization boundary.
enum class DType : std::uint8_t { kFloat32 = 0, kFloat64 = 1 };

template <typename T>
constexpr DType dtype_of();
template <>
constexpr DType dtype_of<float>() { return DType::kFloat32; }
template <>
constexpr DType dtype_of<double>() { return DType::kFloat64; }

inline std::size_t dtype_width(DType dt) {
    return dt == DType::kFloat32 ? 4 : 8;
}

/// Dense n-dimensional array in row-major layout; the single numeric value
/// type crossing all module boundaries (images, activations, parameters,
/// gradients). Shape is fixed at construction; reshaped() returns a copy
/// with the same flat data.
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, T fill = T{})
        : shape_(std::move(shape)), data_(count(shape_), fill) {}

    static Tensor from_data(std::vector<std::size_t> shape, std::vector<T> data) {
        if (count(shape) != data.size()) {
            throw ShapeError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape product " +
                             std::to_string(count(shape)));
        }
        Tensor t;
        t.shape_ = std::move(shape);
        t.data_ = std::move(data);
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](std::size_t i) {
        assert(i < data_.size());
        return data_[i];
    }
    const T& operator[](std::size_t i) const {
        assert(i < data_.size());
        return data_[i];
    }

    T& operator()(std::size_t i, std::size_t j) {
        assert(rank() == 2 && i < shape_[0] && j < shape_[1]);
        return data_[i * shape_[1] + j];
    }
    const T& operator()(std::size_t i, std::size_t j) const {
        assert(rank() == 2 && i < shape_[0] && j < shape_[1]);
        return data_[i * shape_[1] + j];
    }

    T& operator()(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
        assert(rank() == 4);
        return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }
    const T& operator()(std::size_t n, std::size_t c, std::size_t h,
                        std::size_t w) const {
        assert(rank() == 4);
        return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }

    /// Copy with a new shape over the identical flat data sequence.
    Tensor reshaped(std::vector<std::size_t> new_shape) const {
        if (count(new_shape) != data_.size()) {
            throw ShapeError("reshape to product " +
                             std::to_string(count(new_shape)) +
                             " from tensor of size " + std::to_string(data_.size()));
        }
        Tensor t;
        t.shape_ = std::move(new_shape);
        t.data_ = data_;
        return t;
    }

    void fill(T value) { data_.assign(data_.size(), value); }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    constexpr DType dtype() const { return dtype_of<T>(); }

    static std::size_t count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

/// c[i,j] = sum_t a[i,t] * b[t,j], accumulated left-to-right over t.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// c += a * b with the same contraction order as matmul().
template <typename T>
void matmul_accumulate(Tensor<T>& c, const Tensor<T>& a, const Tensor<T>& b);

/// Rank-2 transpose (copy).
template <typename T>
Tensor<T> transposed(const Tensor<T>& t);

/// Row-wise argmax of a rank-2 tensor; ties break to the lowest index.
template <typename T>
std::vector<std::size_t> argmax_last_axis(const Tensor<T>& t);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> hadamard(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);

/// Elementwise map: out[i] = f(in[i]).
template <typename T, typename F>
Tensor<T> map(const Tensor<T>& a, F&& f) {
    Tensor<T> out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

}  // namespace wnet
