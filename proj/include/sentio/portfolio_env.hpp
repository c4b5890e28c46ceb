#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sentio/env.hpp"
#include "sentio/marketdata.hpp"
#include "sentio/rng.hpp"
#include "sentio/trading_env.hpp"

namespace sentio {

struct Position {
  double shares_held = 0.0;
  double cost_basis = 0.0;
};

/// Shared cash plus one position per asset. net_worth marks every position
/// to the current close.
struct PortfolioAccount {
  double balance = 0.0;
  std::vector<Position> positions;
  double net_worth = 0.0;
  double initial_balance = 0.0;
};

struct PortfolioStepResult {
  std::vector<double> observation;  // row-major n x F matrix + net-worth slot
  double reward = 0.0;
  bool done = false;
  struct {
    double net_worth = 0.0;
    double balance = 0.0;
    std::vector<double> holdings;
    double cumulative_profit = 0.0;
  } info;
};

/// Multi-asset environment over an aligned MarketDataset: one (kind, amount)
/// action pair per asset, sells executed before buys in ascending symbol
/// order so rotations can complete within a step, portfolio-level reward
/// with per-asset sentiment alignment averaged over assets.
class PortfolioEnv final : public Environment {
 public:
  PortfolioEnv(MarketDataset dataset, EnvConfig cfg);

  int asset_count() const { return static_cast<int>(dataset_.assets.size()); }
  int observation_size() const override;
  int action_size() const override { return 2 * asset_count(); }

  /// Columns per observation-matrix row (window block + account slots
  /// + optional sentiment slot).
  int row_width() const;

  std::vector<double> reset() override;
  std::vector<double> reset(std::uint64_t seed) override;

  PortfolioStepResult step(const std::vector<double>& action);
  StepOutcome step(std::span<const double> action) override;

  StepInfo current_info() const override {
    return {account_.net_worth, account_.balance,
            account_.net_worth - cfg_.initial_balance};
  }

  std::vector<double> observation() const;

  const PortfolioAccount& account() const { return account_; }
  const MarketDataset& dataset() const { return dataset_; }
  const EnvConfig& config() const { return cfg_; }
  int time_index() const { return t_; }
  bool done() const { return done_; }
  double net_worth_floor() const;

 private:
  std::vector<double> reset_internal();
  double mark_net_worth() const;

  MarketDataset dataset_;
  EnvConfig cfg_;
  Rng rng_;
  PortfolioAccount account_;
  std::vector<int> execution_order_;  // asset indices, ascending by symbol
  int t_ = 0;
  int steps_taken_ = 0;
  bool done_ = true;
};

}  // namespace sentio
