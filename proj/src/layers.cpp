#include "wnet/layers.hpp"

#include <algorithm>
#include <cmath>

namespace wnet {

namespace {

template <typename T>
void expect_rank4(const Tensor<T>& x, const char* who) {
    if (x.rank() != 4) {
        throw ShapeError(std::string(who) + ": expected rank-4 NCHW input, got " +
                         shape_string(x.shape()));
    }
}

/// Lower one sample's receptive fields into a [oh*ow, in_ch*k*k] patch
/// matrix. Out-of-bounds (padding) cells are zero. Column order is
/// (channel, ky, kx) row-major, matching the contraction order of the
/// convolution sum.
template <typename T>
void im2col(const Tensor<T>& x, std::size_t n, std::size_t kernel,
            std::size_t stride, std::size_t pad, std::size_t oh, std::size_t ow,
            Tensor<T>& patches) {
    const std::size_t in_ch = x.dim(1), h = x.dim(2), w = x.dim(3);
    T* out = patches.data();
    for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
            for (std::size_t c = 0; c < in_ch; ++c) {
                for (std::size_t ky = 0; ky < kernel; ++ky) {
                    const std::ptrdiff_t iy =
                        static_cast<std::ptrdiff_t>(oy * stride + ky) -
                        static_cast<std::ptrdiff_t>(pad);
                    for (std::size_t kx = 0; kx < kernel; ++kx) {
                        const std::ptrdiff_t ix =
                            static_cast<std::ptrdiff_t>(ox * stride + kx) -
                            static_cast<std::ptrdiff_t>(pad);
                        T v = T{};
                        if (iy >= 0 && iy < static_cast<std::ptrdiff_t>(h) &&
                            ix >= 0 && ix < static_cast<std::ptrdiff_t>(w)) {
                            v = x(n, c, static_cast<std::size_t>(iy),
                                  static_cast<std::size_t>(ix));
                        }
                        *out++ = v;
                    }
                }
            }
        }
    }
}

/// Scatter-add the patch-space gradient back to input space; the exact
/// adjoint of im2col.
template <typename T>
void col2im_add(const Tensor<T>& dpatches, std::size_t n, std::size_t kernel,
                std::size_t stride, std::size_t pad, std::size_t oh,
                std::size_t ow, Tensor<T>& grad_x) {
    const std::size_t in_ch = grad_x.dim(1), h = grad_x.dim(2), w = grad_x.dim(3);
    const T* src = dpatches.data();
    for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
            for (std::size_t c = 0; c < in_ch; ++c) {
                for (std::size_t ky = 0; ky < kernel; ++ky) {
                    const std::ptrdiff_t iy =
                        static_cast<std::ptrdiff_t>(oy * stride + ky) -
                        static_cast<std::ptrdiff_t>(pad);
                    for (std::size_t kx = 0; kx < kernel; ++kx) {
                        const std::ptrdiff_t ix =
                            static_cast<std::ptrdiff_t>(ox * stride + kx) -
                            static_cast<std::ptrdiff_t>(pad);
                        const T v = *src++;
                        if (iy >= 0 && iy < static_cast<std::ptrdiff_t>(h) &&
                            ix >= 0 && ix < static_cast<std::ptrdiff_t>(w)) {
                            grad_x(n, c, static_cast<std::size_t>(iy),
                                   static_cast<std::size_t>(ix)) += v;
                        }
                    }
                }
            }
        }
    }
}

std::size_t conv_out_dim(std::size_t in, std::size_t kernel, std::size_t stride,
                         std::size_t pad) {
    const std::size_t padded = in + 2 * pad;
    if (padded < kernel) return 0;
    return (padded - kernel) / stride + 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel, std::size_t stride, Padding padding)
    : weights({out_channels, in_channels, kernel, kernel}),
      bias({out_channels}),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding) {
    if (in_channels == 0 || out_channels == 0 || kernel == 0 || stride == 0) {
        throw ConfigError("conv2d: channels, kernel and stride must be positive");
    }
    if (padding == Padding::kSame && kernel % 2 == 0) {
        throw ConfigError("conv2d: SAME padding requires an odd kernel size");
    }
}

template <typename T>
std::vector<std::size_t> Conv2d<T>::output_shape(
    const std::vector<std::size_t>& in) const {
    const std::size_t pad = pad_amount();
    return {in[0], out_channels_, conv_out_dim(in[2], kernel_, stride_, pad),
            conv_out_dim(in[3], kernel_, stride_, pad)};
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) const {
    expect_rank4(x, "conv2d");
    if (x.dim(1) != in_channels_) {
        throw ShapeError("conv2d: input has " + std::to_string(x.dim(1)) +
                         " channels, layer expects " + std::to_string(in_channels_));
    }
    const std::size_t pad = pad_amount();
    const std::size_t batch = x.dim(0);
    const std::size_t oh = conv_out_dim(x.dim(2), kernel_, stride_, pad);
    const std::size_t ow = conv_out_dim(x.dim(3), kernel_, stride_, pad);
    const std::size_t ckk = in_channels_ * kernel_ * kernel_;

    Tensor<T> out({batch, out_channels_, oh, ow});
    const Tensor<T> wmat_t =
        transposed(weights.reshaped({out_channels_, ckk}));  // [ckk, out_ch]
    Tensor<T> patches({oh * ow, ckk});

    for (std::size_t n = 0; n < batch; ++n) {
        im2col(x, n, kernel_, stride_, pad, oh, ow, patches);
        Tensor<T> res = matmul(patches, wmat_t);  // [oh*ow, out_ch]
        for (std::size_t o = 0; o < out_channels_; ++o) {
            const T b = bias[o];
            T* dst = &out(n, o, 0, 0);
            for (std::size_t r = 0; r < oh * ow; ++r) dst[r] = res(r, o) + b;
        }
    }
    return out;
}

template <typename T>
typename Conv2d<T>::Grads Conv2d<T>::backward(const Tensor<T>& x,
                                              const Tensor<T>& grad_out) const {
    expect_rank4(x, "conv2d backward");
    expect_rank4(grad_out, "conv2d backward");
    const auto expected = output_shape(x.shape());
    if (grad_out.shape() != expected || x.dim(1) != in_channels_) {
        throw ShapeError("conv2d backward: grad shape " +
                         shape_string(grad_out.shape()) + " does not match " +
                         shape_string(expected));
    }

    const std::size_t pad = pad_amount();
    const std::size_t batch = x.dim(0);
    const std::size_t oh = grad_out.dim(2), ow = grad_out.dim(3);
    const std::size_t ckk = in_channels_ * kernel_ * kernel_;
    const std::size_t ohw = oh * ow;

    Grads g{Tensor<T>(x.shape()), Tensor<T>(weights.shape()), Tensor<T>(bias.shape())};

    for (std::size_t o = 0; o < out_channels_; ++o) {
        T acc{};
        for (std::size_t n = 0; n < batch; ++n) {
            const T* src = &grad_out(n, o, 0, 0);
            for (std::size_t r = 0; r < ohw; ++r) acc += src[r];
        }
        g.bias[o] = acc;
    }

    const Tensor<T> wmat = weights.reshaped({out_channels_, ckk});
    Tensor<T> grad_wmat({out_channels_, ckk});
    Tensor<T> patches({ohw, ckk});
    Tensor<T> gslice({out_channels_, ohw});

    for (std::size_t n = 0; n < batch; ++n) {
        im2col(x, n, kernel_, stride_, pad, oh, ow, patches);
        std::copy(&grad_out(n, 0, 0, 0), &grad_out(n, 0, 0, 0) + out_channels_ * ohw,
                  gslice.data());
        matmul_accumulate(grad_wmat, gslice, patches);
        Tensor<T> dpatches = matmul(transposed(gslice), wmat);  // [ohw, ckk]
        col2im_add(dpatches, n, kernel_, stride_, pad, oh, ow, g.input);
    }
    g.weights = grad_wmat.reshaped(weights.shape());
    return g;
}

// ---------------------------------------------------------------------------
// MaxPool2d

template <typename T>
MaxPool2d<T>::MaxPool2d(std::size_t window, std::size_t stride, Padding padding)
    : window_(window), stride_(stride), padding_(padding) {
    if (window == 0 || stride == 0) {
        throw ConfigError("maxpool: window and stride must be positive");
    }
}

template <typename T>
std::vector<std::size_t> MaxPool2d<T>::output_shape(
    const std::vector<std::size_t>& in) const {
    auto out_dim = [this](std::size_t d) -> std::size_t {
        if (padding_ == Padding::kSame) return (d + stride_ - 1) / stride_;
        return d >= window_ ? (d - window_) / stride_ + 1 : 0;
    };
    return {in[0], in[1], out_dim(in[2]), out_dim(in[3])};
}

template <typename T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x,
                                std::vector<std::size_t>* argmax) const {
    expect_rank4(x, "maxpool");
    const auto oshape = output_shape(x.shape());
    const std::size_t batch = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = oshape[2], ow = oshape[3];

    Tensor<T> out(oshape);
    if (argmax) argmax->assign(out.size(), 0);

    std::size_t r = 0;
    for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t c = 0; c < ch; ++c) {
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox, ++r) {
                    const std::size_t y0 = oy * stride_, x0 = ox * stride_;
                    const std::size_t y1 = std::min(y0 + window_, h);
                    const std::size_t x1 = std::min(x0 + window_, w);
                    // Cells past the input edge (zero padding) never compete.
                    T best{};
                    std::size_t best_idx = 0;
                    bool first = true;
                    for (std::size_t iy = y0; iy < y1; ++iy) {
                        for (std::size_t ix = x0; ix < x1; ++ix) {
                            const T v = x(n, c, iy, ix);
                            if (first || v > best) {
                                best = v;
                                best_idx = ((n * ch + c) * h + iy) * w + ix;
                                first = false;
                            }
                        }
                    }
                    out[r] = best;
                    if (argmax) (*argmax)[r] = best_idx;
                }
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& grad_out,
                                 const std::vector<std::size_t>& argmax,
                                 const std::vector<std::size_t>& input_shape) const {
    if (argmax.empty() && grad_out.size() != 0) {
        throw StateError("maxpool backward without a matching forward");
    }
    if (argmax.size() != grad_out.size()) {
        throw ShapeError("maxpool backward: argmax cache holds " +
                         std::to_string(argmax.size()) + " entries, grad has " +
                         std::to_string(grad_out.size()));
    }
    Tensor<T> grad_x(input_shape);
    for (std::size_t r = 0; r < grad_out.size(); ++r) {
        grad_x[argmax[r]] += grad_out[r];
    }
    return grad_x;
}

// ---------------------------------------------------------------------------
// Dropout

template <typename T>
Dropout<T>::Dropout(double keep_prob) : keep_prob_(keep_prob) {
    if (!(keep_prob > 0.0) || keep_prob > 1.0) {
        throw ConfigError("dropout: keep probability must be in (0, 1], got " +
                          std::to_string(keep_prob));
    }
}

template <typename T>
Tensor<T> Dropout<T>::forward_train(const Tensor<T>& x, RngStream& rng,
                                    Tensor<T>* mask_out) const {
    if (keep_prob_ == 1.0) {
        if (mask_out) *mask_out = Tensor<T>(x.shape(), T{1});
        return x;
    }
    const T inv_keep = static_cast<T>(1.0 / keep_prob_);
    Tensor<T> mask(x.shape());
    Tensor<T> out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T m = rng.next_uniform() < keep_prob_ ? inv_keep : T{};
        mask[i] = m;
        out[i] = x[i] * m;
    }
    if (mask_out) *mask_out = std::move(mask);
    return out;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& grad_out,
                               const Tensor<T>& mask) const {
    if (!grad_out.same_shape(mask)) {
        throw StateError("dropout backward without a matching forward mask");
    }
    return hadamard(grad_out, mask);
}

// ---------------------------------------------------------------------------
// Dense

template <typename T>
Dense<T>::Dense(std::size_t in_units, std::size_t out_units)
    : weights({in_units, out_units}),
      bias({out_units}),
      in_units_(in_units),
      out_units_(out_units) {
    if (in_units == 0 || out_units == 0) {
        throw ConfigError("dense: unit counts must be positive");
    }
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) const {
    if (x.rank() != 2 || x.dim(1) != in_units_) {
        throw ShapeError("dense: input " + shape_string(x.shape()) +
                         " does not match in_units " + std::to_string(in_units_));
    }
    Tensor<T> out = matmul(x, weights);
    for (std::size_t i = 0; i < x.dim(0); ++i) {
        for (std::size_t j = 0; j < out_units_; ++j) out(i, j) += bias[j];
    }
    return out;
}

template <typename T>
typename Dense<T>::Grads Dense<T>::backward(const Tensor<T>& x,
                                            const Tensor<T>& grad_out) const {
    if (x.rank() != 2 || x.dim(1) != in_units_ || grad_out.rank() != 2 ||
        grad_out.dim(1) != out_units_ || grad_out.dim(0) != x.dim(0)) {
        throw ShapeError("dense backward: shapes " + shape_string(x.shape()) +
                         " / " + shape_string(grad_out.shape()) + " inconsistent");
    }
    Grads g;
    g.input = matmul(grad_out, transposed(weights));
    g.weights = matmul(transposed(x), grad_out);
    g.bias = Tensor<T>({out_units_});
    for (std::size_t j = 0; j < out_units_; ++j) {
        T acc{};
        for (std::size_t i = 0; i < x.dim(0); ++i) acc += grad_out(i, j);
        g.bias[j] = acc;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Pointwise layers

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    return map(x, [](T v) { return v > T{} ? v : T{}; });
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
    if (!x.same_shape(grad_out)) {
        throw ShapeError("relu backward: shape mismatch " +
                         shape_string(x.shape()) + " vs " +
                         shape_string(grad_out.shape()));
    }
    Tensor<T> grad_x(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        grad_x[i] = x[i] > T{} ? grad_out[i] : T{};
    }
    return grad_x;
}

template <typename T>
Tensor<T> flatten(const Tensor<T>& x) {
    if (x.rank() != 4) {
        throw ShapeError("flatten: expected rank-4 input, got " +
                         shape_string(x.shape()));
    }
    return x.reshaped({x.dim(0), x.dim(1) * x.dim(2) * x.dim(3)});
}

template class Conv2d<float>;
template class Conv2d<double>;
template class MaxPool2d<float>;
template class MaxPool2d<double>;
template class Dropout<float>;
template class Dropout<double>;
template class Dense<float>;
template class Dense<double>;
template Tensor<float> relu(const Tensor<float>&);
template Tensor<double> relu(const Tensor<double>&);
template Tensor<float> relu_backward(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> relu_backward(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> flatten(const Tensor<float>&);
template Tensor<double> flatten(const Tensor<double>&);

}  // namespace wnet
