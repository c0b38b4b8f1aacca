#pragma once

#include <span>
#include <string>
#include <vector>

#include "wnet/layers.hpp"
#include "wnet/loss.hpp"
#include "wnet/optim.hpp"
#include "wnet/rng.hpp"
#include "wnet/tensor.hpp"

namespace wnet {

enum class Mode { kTrain, kInfer };

/// Architecture description. The defaults are the full WBC classifier:
/// three 3x3 conv blocks (16/32/64 filters, each followed by ReLU, 2x2
/// max pooling and dropout), a 1024-unit dense layer with ReLU and dropout,
/// and a 5-way classifier head. Shrunken configs (fewer filters, smaller
/// input) share the exact same code path, which is what makes end-to-end
/// gradient checking feasible.
struct ModelConfig {
    std::size_t in_channels = 3;
    std::size_t in_height = 128;
    std::size_t in_width = 128;
    std::vector<std::size_t> conv_filters{16, 32, 64};
    std::size_t kernel = 3;
    std::size_t conv_stride = 1;
    std::size_t pool_window = 2;
    std::size_t pool_stride = 2;
    std::size_t fc1_units = 1024;
    std::size_t num_classes = 5;
    double dropout_keep = 0.6;
    XavierVariant init_variant = XavierVariant::kUniform;

    void validate() const;

    /// Spatial dims after every conv block (SAME conv + ceil-mode pooling).
    std::pair<std::size_t, std::size_t> final_spatial() const;

    /// Width of the flattened conv output feeding the first dense layer.
    std::size_t flatten_width() const;

    bool operator==(const ModelConfig&) const = default;
};

template <typename T>
struct BackwardResult {
    T loss;
    std::vector<Tensor<T>> gradients;  // aligned with parameters() order
};

template <typename T>
struct Prediction {
    std::vector<std::size_t> classes;
    Tensor<T> probabilities;  // [n, num_classes]
};

template <typename T>
struct NamedParam {
    std::string name;
    Tensor<T>* tensor;
};

/// The assembled network. Parameters are created by Xavier init (biases
/// zero) in fixed layer order from the caller's stream, so one seed pins the
/// whole initial state bit for bit.
template <typename T>
class WNetModel {
public:
    WNetModel(const ModelConfig& config, RngStream& rng);

    /// Build with zero parameters; used by the checkpoint loader.
    static WNetModel zeros(const ModelConfig& config);

    Mode mode() const { return mode_; }
    void set_mode(Mode mode) { mode_ = mode; }

    /// Runs the full stack. In train mode dropout draws from `rng` (required
    /// unless dropout keep is 1) and the activations needed by backward()
    /// are recorded. In infer mode the pass is pure and no trace is kept.
    Tensor<T> forward(const Tensor<T>& batch, RngStream* rng = nullptr);

    /// Gradients of the mean softmax cross-entropy w.r.t. every parameter,
    /// using the trace of the immediately preceding train-mode forward().
    /// The trace is consumed; a second call without a new forward throws.
    BackwardResult<T> backward(std::span<const int> labels);

    /// Infer-mode only: argmax class per row plus the full softmax rows.
    Prediction<T> predict(const Tensor<T>& batch);

    std::vector<NamedParam<T>> parameters();
    std::vector<std::pair<std::string, const Tensor<T>*>> parameters() const;

    std::size_t parameter_count() const;
    /// One entry per trainable layer (conv blocks then dense layers),
    /// counting weights + bias.
    std::vector<std::size_t> per_layer_parameter_counts() const;

    const ModelConfig& config() const { return config_; }

    std::size_t conv_block_count() const { return conv_.size(); }
    const Conv2d<T>& conv_block(std::size_t i) const { return conv_[i]; }
    Dense<T>& fc1() { return fc1_; }
    Dense<T>& fc2() { return fc2_; }

private:
    struct ZeroTag {};
    WNetModel(const ModelConfig& config, ZeroTag);
    void check_input(const Tensor<T>& batch) const;

    ModelConfig config_;
    std::vector<Conv2d<T>> conv_;
    MaxPool2d<T> pool_;
    Dropout<T> dropout_;
    Dense<T> fc1_;
    Dense<T> fc2_;
    Mode mode_ = Mode::kTrain;

    // Per-call state recorded by a train-mode forward and consumed by the
    // matching backward.
    struct Trace {
        bool valid = false;
        std::vector<Tensor<T>> conv_in;    // input to conv i
        std::vector<Tensor<T>> conv_out;   // pre-ReLU conv output
        std::vector<Tensor<T>> relu_out;   // pooling input
        std::vector<std::vector<std::size_t>> pool_argmax;
        std::vector<std::vector<std::size_t>> pool_in_shape;
        std::vector<Tensor<T>> drop_mask;  // one per conv block
        Tensor<T> fc1_in;                  // flattened features
        Tensor<T> fc1_out;                 // pre-ReLU
        Tensor<T> fc1_act;                 // post-ReLU
        Tensor<T> fc2_in;                  // post-dropout
        Tensor<T> fc1_drop_mask;
        Tensor<T> logits;
    };
    Trace trace_;
};

/// build_wnet is the canonical constructor name used at module boundaries.
template <typename T>
WNetModel<T> build_wnet(const ModelConfig& config, RngStream& rng) {
    return WNetModel<T>(config, rng);
}

}  // namespace wnet
