#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sentio/env.hpp"
#include "sentio/marketdata.hpp"
#include "sentio/rng.hpp"

namespace sentio {

/// Cash/position bookkeeping for one asset. net_worth is always recomputed
/// as balance + shares_held * close, so the accounting identity holds by
/// construction; balance and shares never go negative.
struct AccountState {
  double balance = 0.0;
  double shares_held = 0.0;
  double cost_basis = 0.0;  // holdings-weighted average purchase price
  double net_worth = 0.0;
  double initial_balance = 0.0;
};

/// Continuous two-part action: kind in [0,2] (buy < 1, hold = 1, sell > 1)
/// and amount in [0,0.5], the traded fraction.
struct RawAction {
  double kind = 1.0;
  double amount = 0.0;
};

enum class TradeSide { Buy, Sell, Hold };

/// Decoded action. fraction can exceed 0.5 (up to 0.6) once sentiment bias
/// is applied; Hold stores 0.
struct TradeDecision {
  TradeSide side = TradeSide::Hold;
  double fraction = 0.0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  struct {
    double net_worth = 0.0;
    double balance = 0.0;
    double shares_held = 0.0;
    double cumulative_profit = 0.0;
  } info;
};

/// Clamps, then decodes: kind < 1 -> Buy, kind == 1 -> Hold, kind > 1 ->
/// Sell. Throws DataError on non-finite inputs.
TradeDecision decode_action(const RawAction& raw);

/// Sentiment lean: Buy fraction += 0.1*score, Sell fraction -= 0.1*score,
/// then clamp to [0, 0.6]; Hold unchanged. Positive score raises buys and
/// lowers sells.
TradeDecision apply_sentiment_bias(const TradeDecision& decision, double score);

/// Executes one decision at `price`, mutating the account. Buys spend
/// balance * fraction, sells liquidate shares_held * fraction; cost basis is
/// the holdings-weighted average and resets to 0 when flat. Returns the
/// trade notional (shares traded x price). Net worth is recomputed against
/// `price`.
double execute_trade(AccountState& account, const TradeDecision& decision, double price);

/// Alignment bonus: |score| when sign(score) == sign(price_delta) (both
/// non-zero), damped by 1/(1 + kappa * volatility).
double alignment_bonus(double score, double price_delta, double volatility, double kappa);

/// Reward terms shared by both environments, all normalized by the initial
/// balance: net-worth delta, balance-stability penalty, transaction-cost
/// penalty, plus the already-aggregated sentiment alignment term.
double reward_from_terms(double net_worth_delta, double balance, double notional,
                         double align_term, const EnvConfig& cfg);

/// Full single-asset reward. `score`/`price_delta`/`volatility` feed the
/// alignment term, which is active only when cfg.sentiment_enabled.
double compute_reward(const AccountState& prev, const AccountState& curr,
                      double notional, double score, double price_delta,
                      double volatility, const EnvConfig& cfg);

/// Single-stock trading environment over one AssetSeries (step/reset
/// semantics, sentiment-aware observations, multi-part reward).
class TradingEnv final : public Environment {
 public:
  TradingEnv(AssetSeries series, EnvConfig cfg);

  int observation_size() const override;
  int action_size() const override { return 2; }

  std::vector<double> reset() override;
  std::vector<double> reset(std::uint64_t seed) override;

  StepResult step(const RawAction& raw);
  StepOutcome step(std::span<const double> action) override;

  StepInfo current_info() const override {
    return {account_.net_worth, account_.balance,
            account_.net_worth - cfg_.initial_balance};
  }

  std::vector<double> observation() const;

  const AccountState& account() const { return account_; }
  const AssetSeries& series() const { return series_; }
  const EnvConfig& config() const { return cfg_; }
  int time_index() const { return t_; }
  bool done() const { return done_; }
  double net_worth_floor() const;

 private:
  std::vector<double> reset_internal();
  double current_close() const { return series_.bars[t_].close; }

  AssetSeries series_;
  EnvConfig cfg_;
  Rng rng_;
  AccountState account_;
  int t_ = 0;
  int steps_taken_ = 0;
  bool done_ = true;
};

}  // namespace sentio
