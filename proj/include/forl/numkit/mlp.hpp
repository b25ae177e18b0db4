#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "forl/numkit/matrix.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::num {

enum class Activation { identity, silu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Fully connected network y = f_L(... f_1(x W_1 + b_1) ...) W_L + b_L.
///
/// All weights and biases live in one flat buffer so optimizers and
/// checkpoints can treat the network as a single parameter vector. Layer l
/// stores its weight as an (in x out) row-major block followed by its bias.
/// Hidden layers apply the activation listed for them; the output layer is
/// always linear.
class MlpParams {
public:
    MlpParams() = default;
    MlpParams(std::vector<std::size_t> widths, std::vector<Activation> hidden_activations);

    /// Weights ~ N(0, 1/fan_in), biases 0.
    static MlpParams init(std::vector<std::size_t> widths, Activation hidden, Rng& rng);

    /// Builds a network from explicit (weight, bias) pairs; weight l is (in x out).
    static MlpParams from_layers(const std::vector<std::pair<Matrix, std::vector<double>>>& layers,
                                 std::vector<Activation> hidden_activations);

    std::size_t num_layers() const { return widths_.empty() ? 0 : widths_.size() - 1; }
    std::size_t in_dim() const { return widths_.front(); }
    std::size_t out_dim() const { return widths_.back(); }
    const std::vector<std::size_t>& widths() const { return widths_; }
    const std::vector<Activation>& hidden_activations() const { return acts_; }

    std::size_t num_params() const { return flat_.size(); }
    std::span<double> flat() { return flat_; }
    std::span<const double> flat() const { return flat_; }

    std::span<double> weights(std::size_t layer);
    std::span<const double> weights(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;

    /// Offset of layer `layer`'s weight block inside flat().
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + widths_[layer] * widths_[layer + 1];
    }

    bool all_finite() const;

private:
    std::vector<std::size_t> widths_;
    std::vector<Activation> acts_;
    std::vector<std::size_t> offsets_;
    AlignedVector flat_;
};

/// Intermediate values of a batched forward pass, needed for backprop.
struct MlpTape {
    std::vector<Matrix> inputs;  // inputs[l] feeds layer l (inputs[0] = batch input)
    std::vector<Matrix> pre;     // pre-activation of each hidden layer
};

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);

struct MlpGradients {
    AlignedVector params;  // same layout as MlpParams::flat()
    std::vector<double> input;
};

/// Gradients of the scalar loss whose gradient w.r.t. the output is `upstream`.
MlpGradients mlp_backward(const MlpParams& params, std::span<const double> input,
                          std::span<const double> upstream);

/// Row-batched forward pass. Each row of `x` is one input.
Matrix mlp_forward_batch(const MlpParams& params, const Matrix& x, MlpTape* tape = nullptr);

/// First-layer bias plus the contribution of input columns
/// [first_col, first_col + values.size()) holding `values`.
std::vector<double> mlp_first_layer_partial(const MlpParams& params, std::size_t first_col,
                                            std::span<const double> values);

/// Batched forward pass where each input row is [head row, shared tail] and
/// the tail's first-layer contribution (bias included) is given as
/// `shared_pre`, as returned by mlp_first_layer_partial(params, head.cols(), tail).
Matrix mlp_forward_batch_shared(const MlpParams& params, const Matrix& head, std::span<const double> shared_pre);

/// Row-batched backward pass. Adds parameter gradients into `grad_accum`
/// (length num_params()) and returns the gradient w.r.t. the batch input.
Matrix mlp_backward_batch(const MlpParams& params, const MlpTape& tape, const Matrix& upstream,
                          std::span<double> grad_accum);

}  // namespace forl::num
