#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sentio/env.hpp"
#include "sentio/mlp.hpp"
#include "sentio/rng.hpp"

namespace sentio {

/// Diagonal-Gaussian actor-critic: the actor emits per-dimension action
/// means, log_std is state-independent, the critic a scalar state value.
struct PolicyParams {
  Mlp actor;
  Mlp critic;
  std::vector<double> log_std;

  static PolicyParams init(int obs_dim, int action_dim,
                           const std::vector<int>& hidden_sizes, Rng& rng);
  PolicyParams zeros_like() const;

  int obs_dim() const { return actor.input_size(); }
  int action_dim() const { return actor.output_size(); }
  std::size_t param_count() const {
    return actor.param_count() + critic.param_count() + log_std.size();
  }
};

/// Visits every parameter in a fixed order (actor, critic, log_std).
/// `Params` may be const- or non-const-qualified PolicyParams.
template <typename Params, typename Fn>
void for_each_param(Params& p, Fn&& fn) {
  for (auto& layer : p.actor.weights)
    for (auto& v : layer) fn(v);
  for (auto& layer : p.actor.biases)
    for (auto& v : layer) fn(v);
  for (auto& layer : p.critic.weights)
    for (auto& v : layer) fn(v);
  for (auto& layer : p.critic.biases)
    for (auto& v : layer) fn(v);
  for (auto& v : p.log_std) fn(v);
}

template <typename ParamsA, typename ParamsB, typename Fn>
void for_each_param(ParamsA& a, ParamsB& b, Fn&& fn) {
  for (std::size_t k = 0; k < a.actor.weights.size(); ++k)
    for (std::size_t i = 0; i < a.actor.weights[k].size(); ++i)
      fn(a.actor.weights[k][i], b.actor.weights[k][i]);
  for (std::size_t k = 0; k < a.actor.biases.size(); ++k)
    for (std::size_t i = 0; i < a.actor.biases[k].size(); ++i)
      fn(a.actor.biases[k][i], b.actor.biases[k][i]);
  for (std::size_t k = 0; k < a.critic.weights.size(); ++k)
    for (std::size_t i = 0; i < a.critic.weights[k].size(); ++i)
      fn(a.critic.weights[k][i], b.critic.weights[k][i]);
  for (std::size_t k = 0; k < a.critic.biases.size(); ++k)
    for (std::size_t i = 0; i < a.critic.biases[k].size(); ++i)
      fn(a.critic.biases[k][i], b.critic.biases[k][i]);
  for (std::size_t i = 0; i < a.log_std.size(); ++i) fn(a.log_std[i], b.log_std[i]);
}

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double learning_rate = 3e-4;
  int rollout_horizon = 2048;
  int update_epochs = 10;
  int minibatch_size = 64;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double grad_clip_norm = 0.5;
  long total_timesteps = 20000;
  std::vector<int> hidden_sizes = {64, 64};
  std::string optimizer = "sgd";  // "sgd" or "adam"
  std::uint64_t seed = 0;
};

/// Flat per-step storage for one rollout.
struct RolloutBuffer {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<double> observations;  // size * obs_dim
  std::vector<double> actions;       // size * act_dim, unclipped samples
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<double> values;

  std::size_t size() const { return rewards.size(); }
  void clear();
  void store(std::span<const double> obs, std::span<const double> action,
             double log_prob, double reward, bool done, double value);
};

struct ForwardResult {
  std::vector<double> mean;
  std::vector<double> log_std;
  double value = 0.0;
};

/// Deterministic actor/critic pass; throws on observation size mismatch.
ForwardResult forward(const PolicyParams& params, std::span<const double> obs);

/// Diagonal-Gaussian log density at `action`. log_std entries are floored
/// at -20 so a collapsed policy degrades to a deterministic one.
double gaussian_log_prob(std::span<const double> action, std::span<const double> mean,
                         std::span<const double> log_std);

/// Samples an unclipped action and its log probability. Callers clip the
/// sample into the environment bounds before stepping.
std::pair<std::vector<double>, double> sample_action(const PolicyParams& params,
                                                     std::span<const double> obs,
                                                     Rng& rng);

/// GAE(gamma, lambda): advantages plus returns (= advantages + values).
/// `bootstrap_value` is the critic estimate past the final step; done flags
/// cut the recursion.
std::pair<std::vector<double>, std::vector<double>> compute_gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    const std::vector<std::uint8_t>& dones, double bootstrap_value, double gamma,
    double lambda);

/// In-place shift/scale to mean 0, population std 1 (1e-8 guard).
void normalize_advantages(std::span<double> advantages);

/// One minibatch of training data. Advantages are expected pre-normalized.
struct Minibatch {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<double> observations;
  std::vector<double> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return old_log_probs.size(); }
};

struct LossResult {
  double total = 0.0;
  double policy = 0.0;   // -mean(min(ratio*A, clip(ratio)*A))
  double value = 0.0;    // mean((V - returns)^2), before value_coef
  double entropy = 0.0;  // mean policy entropy
};

/// Clipped-surrogate PPO loss. When `grads` is non-null, accumulates
/// d(total)/d(params) into it via the hand-rolled backward pass. Throws
/// NumericError on a non-finite loss.
LossResult ppo_loss(const PolicyParams& params, const Minibatch& batch,
                    const PpoConfig& cfg, PolicyParams* grads);

/// Central finite differences (h = 1e-5) against the analytic gradients;
/// returns max over parameters of |ga - gn| / max(1e-8, |ga| + |gn|).
double grad_check(const PolicyParams& params, const Minibatch& batch,
                  const PpoConfig& cfg);

struct TrainLogRow {
  int iteration = 0;
  long timesteps = 0;
  double mean_ep_reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<TrainLogRow> log;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

/// Full PPO training loop: rollout collection with auto-reset, GAE,
/// shuffled-minibatch clipped updates with global gradient-norm clipping.
/// Single-threaded and bit-reproducible for a fixed config and seed.
TrainResult train(const EnvFactory& env_factory, const PpoConfig& cfg);

/// Versioned flat text format (`SENTIO-MODEL v1`): layer-size manifest then
/// one parameter per line at full decimal precision, so load(save(p))
/// reproduces forward outputs bit-for-bit.
void save_model(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_model(const std::filesystem::path& path);

void write_training_log_csv(const std::vector<TrainLogRow>& log,
                            const std::filesystem::path& path);

}  // namespace sentio
