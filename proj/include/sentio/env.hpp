#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sentio {

/// Shared configuration for both trading environments.
struct EnvConfig {
  double initial_balance = 10000.0;
  int window = 5;
  int max_steps = 2000;
  double tx_cost_rate = 0.001;    // fraction of trade notional
  double stability_coef = 0.01;   // lambda_stab
  double sentiment_coef = 0.01;   // lambda_sent
  double vol_damping = 10.0;      // kappa
  // Episode ends when net worth <= floor_frac * initial_balance.
  // Unset picks the per-environment default: 0.0 single-stock, 0.1 portfolio.
  std::optional<double> net_worth_floor_frac;
  bool sentiment_enabled = false;
  std::uint64_t seed = 0;
};

struct StepInfo {
  double net_worth = 0.0;
  double balance = 0.0;
  double cumulative_profit = 0.0;
};

struct StepOutcome {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// Flat-vector environment surface consumed by the PPO trainer and the
/// evaluation harness. Actions are interleaved (kind, amount) pairs with
/// kind in [0,2] and amount in [0,0.5]; both envs implement it on top of
/// their typed step functions.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int observation_size() const = 0;
  virtual int action_size() const = 0;

  std::pair<double, double> action_bounds(int dim) const {
    return dim % 2 == 0 ? std::pair{0.0, 2.0} : std::pair{0.0, 0.5};
  }

  /// Starts a new episode, continuing the environment RNG stream.
  virtual std::vector<double> reset() = 0;
  /// Starts a new episode from a freshly seeded RNG.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;

  virtual StepOutcome step(std::span<const double> action) = 0;

  /// Account snapshot at the current step (valid after reset).
  virtual StepInfo current_info() const = 0;
};

}  // namespace sentio
