#pragma once

#include <span>
#include <vector>

#include "sentio/rng.hpp"

namespace sentio {

/// Fully connected net with tanh hidden activations and a linear output
/// layer. Weights are row-major (out x in). The same struct doubles as a
/// gradient container, since gradients share the parameter shapes.
struct Mlp {
  std::vector<int> layer_sizes;               // e.g. {29, 64, 64, 2}
  std::vector<std::vector<double>> weights;   // one row-major matrix per layer
  std::vector<std::vector<double>> biases;

  static Mlp zeros(std::vector<int> sizes);
  static Mlp xavier_uniform(std::vector<int> sizes, Rng& rng);

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t param_count() const;

  std::vector<double> forward(std::span<const double> input) const;
};

/// Per-sample activation cache: activations[0] is the input, activations[k]
/// the post-activation output of layer k-1 (the last one is the raw linear
/// output).
struct MlpTape {
  std::vector<std::vector<double>> activations;
};

std::vector<double> forward_tape(const Mlp& net, std::span<const double> input,
                                 MlpTape& tape);

/// Accumulates dLoss/dparams into `grads` (same shapes as `net`) given
/// dLoss/doutput for the sample recorded on `tape`.
void backward_tape(const Mlp& net, const MlpTape& tape,
                   std::span<const double> output_grad, Mlp& grads);

}  // namespace sentio
