#include "sentio/mlp.hpp"

#include <cmath>

#include "sentio/errors.hpp"

namespace sentio {

Mlp Mlp::zeros(std::vector<int> sizes) {
  if (sizes.size() < 2) throw DataError("Mlp: need at least input and output sizes");
  for (int s : sizes) {
    if (s <= 0) throw DataError("Mlp: layer sizes must be positive");
  }
  Mlp net;
  net.layer_sizes = std::move(sizes);
  for (std::size_t k = 0; k + 1 < net.layer_sizes.size(); ++k) {
    const int in = net.layer_sizes[k];
    const int out = net.layer_sizes[k + 1];
    net.weights.emplace_back(static_cast<std::size_t>(in) * out, 0.0);
    net.biases.emplace_back(out, 0.0);
  }
  return net;
}

Mlp Mlp::xavier_uniform(std::vector<int> sizes, Rng& rng) {
  Mlp net = zeros(std::move(sizes));
  for (int k = 0; k < net.layer_count(); ++k) {
    const int in = net.layer_sizes[k];
    const int out = net.layer_sizes[k + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    for (auto& w : net.weights[k]) w = rng.uniform(-bound, bound);
  }
  return net;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw DataError("Mlp::forward: expected input of size " +
                    std::to_string(input_size()) + ", got " +
                    std::to_string(input.size()));
  }
  std::vector<double> a(input.begin(), input.end());
  for (int k = 0; k < layer_count(); ++k) {
    const int in = layer_sizes[k];
    const int out = layer_sizes[k + 1];
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double acc = biases[k][o];
      const double* row = &weights[k][static_cast<std::size_t>(o) * in];
      for (int i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = (k + 1 < layer_count()) ? std::tanh(acc) : acc;
    }
    a = std::move(z);
  }
  return a;
}

std::vector<double> forward_tape(const Mlp& net, std::span<const double> input,
                                 MlpTape& tape) {
  if (static_cast<int>(input.size()) != net.input_size()) {
    throw DataError("forward_tape: expected input of size " +
                    std::to_string(net.input_size()) + ", got " +
                    std::to_string(input.size()));
  }
  tape.activations.assign(1, std::vector<double>(input.begin(), input.end()));
  for (int k = 0; k < net.layer_count(); ++k) {
    const int in = net.layer_sizes[k];
    const int out = net.layer_sizes[k + 1];
    const auto& a = tape.activations.back();
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double acc = net.biases[k][o];
      const double* row = &net.weights[k][static_cast<std::size_t>(o) * in];
      for (int i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = (k + 1 < net.layer_count()) ? std::tanh(acc) : acc;
    }
    tape.activations.push_back(std::move(z));
  }
  return tape.activations.back();
}

void backward_tape(const Mlp& net, const MlpTape& tape,
                   std::span<const double> output_grad, Mlp& grads) {
  // delta = dLoss/dz for the current layer; the output layer is linear so
  // delta starts as the raw output gradient.
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (int k = net.layer_count() - 1; k >= 0; --k) {
    const int in = net.layer_sizes[k];
    const int out = net.layer_sizes[k + 1];
    const auto& a_in = tape.activations[k];

    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      grads.biases[k][o] += d;
      double* grow = &grads.weights[k][static_cast<std::size_t>(o) * in];
      for (int i = 0; i < in; ++i) grow[i] += d * a_in[i];
    }
    if (k == 0) break;

    std::vector<double> prev(in, 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      const double* row = &net.weights[k][static_cast<std::size_t>(o) * in];
      for (int i = 0; i < in; ++i) prev[i] += d * row[i];
    }
    // Chain through the tanh that produced activations[k].
    for (int i = 0; i < in; ++i) {
      const double a = tape.activations[k][i];
      prev[i] *= 1.0 - a * a;
    }
    delta = std::move(prev);
  }
}

}  // namespace sentio
