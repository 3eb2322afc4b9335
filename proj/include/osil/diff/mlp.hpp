#pragma once

#include <span>
#include <string>
#include <vector>

#include "osil/core/rng.hpp"
#include "osil/diff/param_vector.hpp"

namespace osil {

enum class Activation { kTanh, kRelu };
enum class OutputTransform { kIdentity, kSigmoid, kUnitNormalize };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);
OutputTransform output_transform_from_string(const std::string& s);
std::string to_string(OutputTransform t);

// Scratch buffers for one forward/backward pass. Reusing a workspace across
// calls avoids per-step allocation in training loops.
struct MlpWorkspace {
    // acts[0] is the input copy; acts[l+1] is layer l's post-nonlinearity
    // output, except the last entry which holds the raw (pre-transform)
    // output of the final layer.
    std::vector<std::vector<double>> acts;
    std::vector<double> out;
    double raw_norm = 0.0;  // only meaningful under kUnitNormalize

    // Tangent buffers used by the forward-over-reverse pass.
    std::vector<std::vector<double>> acts_dot;
    std::vector<double> scratch_h, scratch_delta, scratch_h_dot, scratch_delta_dot;
    std::vector<double> input_grad;
};

// Fully connected network with dense layers, a hidden nonlinearity, and an
// output transform. Weights live in an external ParamVector so optimizer
// state, Polyak targets, and checkpoints all operate on flat arrays.
class Mlp {
  public:
    Mlp(std::vector<int> layer_sizes, Activation act, OutputTransform transform,
        std::string name = "mlp");

    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
    const std::vector<int>& layer_sizes() const { return sizes_; }
    Activation activation() const { return act_; }
    OutputTransform transform() const { return transform_; }
    const std::string& name() const { return name_; }

    ParamVector& params() { return params_; }
    const ParamVector& params() const { return params_; }

    // Glorot-uniform weights, zero biases. Consumes one uniform draw per
    // weight in layer-major, row-major order, so init is reproducible.
    void init_glorot(Rng& rng);

    // Runs the network; `ws.out` holds the transformed output afterwards.
    void forward(std::span<const double> input, MlpWorkspace& ws) const;

    // Reverse pass for the forward stored in `ws`. Accumulates parameter
    // gradients into `pgrad` (size params().size(); pass an empty span to
    // skip) and, when `input_grad` is non-empty, writes dL/dinput there.
    void backward(const MlpWorkspace& ws, std::span<const double> grad_out,
                  std::span<double> pgrad, std::span<double> input_grad = {}) const;

    // For a scalar-output, identity-transform network where the downstream
    // loss has dL/dout = delta and d2L/dout2 = delta_prime at this input:
    // computes g = dL/dinput, accumulates d(|g|^2)/dparams into `pgrad`,
    // and returns |g|^2. Used for discriminator gradient penalties, which
    // need this one mixed second derivative rather than general autodiff.
    double input_grad_norm_sq_backward(std::span<const double> input, double delta,
                                       double delta_prime, std::span<double> pgrad,
                                       MlpWorkspace& ws) const;

    std::size_t weight_offset(int layer) const { return params_.layout()[2 * layer].offset; }
    std::size_t bias_offset(int layer) const { return params_.layout()[2 * layer + 1].offset; }

  private:
    std::vector<int> sizes_;
    Activation act_;
    OutputTransform transform_;
    std::string name_;
    ParamVector params_;
};

}  // namespace osil
