#include "sentio/trading_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentio/errors.hpp"

namespace sentio {

namespace {
double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

TradeDecision decode_action(const RawAction& raw) {
  if (!std::isfinite(raw.kind) || !std::isfinite(raw.amount)) {
    throw DataError("invalid action: non-finite component");
  }
  const double kind = clamp(raw.kind, 0.0, 2.0);
  const double amount = clamp(raw.amount, 0.0, 0.5);
  if (kind < 1.0) return {TradeSide::Buy, amount};
  if (kind > 1.0) return {TradeSide::Sell, amount};
  return {TradeSide::Hold, 0.0};
}

TradeDecision apply_sentiment_bias(const TradeDecision& decision, double score) {
  switch (decision.side) {
    case TradeSide::Buy:
      return {TradeSide::Buy, clamp(decision.fraction + 0.1 * score, 0.0, 0.6)};
    case TradeSide::Sell:
      return {TradeSide::Sell, clamp(decision.fraction - 0.1 * score, 0.0, 0.6)};
    case TradeSide::Hold:
      return decision;
  }
  return decision;
}

double execute_trade(AccountState& account, const TradeDecision& decision, double price) {
  const double fraction = clamp(decision.fraction, 0.0, 1.0);
  double notional = 0.0;

  if (decision.side == TradeSide::Buy && fraction > 0.0) {
    const double max_shares = account.balance / price;
    const double shares_bought = max_shares * fraction;
    const double cost = shares_bought * price;
    if (shares_bought > 0.0) {
      account.cost_basis =
          (account.shares_held * account.cost_basis + cost) /
          (account.shares_held + shares_bought);
      account.balance = std::max(0.0, account.balance - cost);
      account.shares_held += shares_bought;
      notional = cost;
    }
  } else if (decision.side == TradeSide::Sell && fraction > 0.0) {
    const double shares_sold = account.shares_held * fraction;
    const double proceeds = shares_sold * price;
    account.balance += proceeds;
    account.shares_held -= shares_sold;
    if (account.shares_held == 0.0) account.cost_basis = 0.0;
    notional = proceeds;
  }

  account.net_worth = account.balance + account.shares_held * price;
  return notional;
}

double alignment_bonus(double score, double price_delta, double volatility, double kappa) {
  const bool aligned = (score > 0.0 && price_delta > 0.0) ||
                       (score < 0.0 && price_delta < 0.0);
  if (!aligned) return 0.0;
  return std::abs(score) / (1.0 + kappa * volatility);
}

double reward_from_terms(double net_worth_delta, double balance, double notional,
                         double align_term, const EnvConfig& cfg) {
  const double b0 = cfg.initial_balance;
  return net_worth_delta / b0 -
         cfg.stability_coef * std::abs(balance - b0) / b0 -
         cfg.tx_cost_rate * notional / b0 +
         cfg.sentiment_coef * align_term;
}

double compute_reward(const AccountState& prev, const AccountState& curr,
                      double notional, double score, double price_delta,
                      double volatility, const EnvConfig& cfg) {
  const double align =
      cfg.sentiment_enabled
          ? alignment_bonus(score, price_delta, volatility, cfg.vol_damping)
          : 0.0;
  return reward_from_terms(curr.net_worth - prev.net_worth, curr.balance,
                           notional, align, cfg);
}

TradingEnv::TradingEnv(AssetSeries series, EnvConfig cfg)
    : series_(std::move(series)), cfg_(cfg), rng_(cfg.seed) {
  if (cfg_.window < 2) throw DataError("TradingEnv: window must be >= 2");
  if (static_cast<int>(series_.size()) < cfg_.window + 2) {
    throw DataError("TradingEnv: series '" + series_.symbol + "' has " +
                    std::to_string(series_.size()) + " bars, need at least " +
                    std::to_string(cfg_.window + 2));
  }
  if (series_.scores.size() != series_.bars.size()) {
    throw DataError("TradingEnv: scores/bars length mismatch");
  }
}

int TradingEnv::observation_size() const {
  return cfg_.window * 5 + 4 + (cfg_.sentiment_enabled ? 1 : 0);
}

double TradingEnv::net_worth_floor() const {
  return cfg_.net_worth_floor_frac.value_or(0.0) * cfg_.initial_balance;
}

std::vector<double> TradingEnv::reset() { return reset_internal(); }

std::vector<double> TradingEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset_internal();
}

std::vector<double> TradingEnv::reset_internal() {
  const int len = static_cast<int>(series_.size());
  t_ = static_cast<int>(rng_.uniform_int(cfg_.window - 1, len - 2));
  account_.initial_balance = cfg_.initial_balance;
  account_.balance = cfg_.initial_balance;
  account_.shares_held = 0.0;
  account_.cost_basis = 0.0;
  account_.net_worth = cfg_.initial_balance;
  steps_taken_ = 0;
  done_ = false;
  return observation();
}

StepResult TradingEnv::step(const RawAction& raw) {
  if (done_) throw std::logic_error("TradingEnv::step: episode already finished");

  TradeDecision decision = decode_action(raw);
  const double score = series_.scores[t_];
  if (cfg_.sentiment_enabled) decision = apply_sentiment_bias(decision, score);

  const AccountState prev = account_;
  const double volatility = rolling_volatility(series_, t_, cfg_.window);
  const double notional = execute_trade(account_, decision, current_close());

  // Advance time, wrapping back to the first valid window position.
  const int len = static_cast<int>(series_.size());
  t_ = (t_ == len - 1) ? cfg_.window - 1 : t_ + 1;
  ++steps_taken_;

  // Mark to the new close; the net-worth delta is the reward's profit term.
  account_.net_worth = account_.balance + account_.shares_held * current_close();
  const double price_delta = series_.bars[t_].close - series_.bars[t_ - 1].close;

  StepResult result;
  result.reward =
      compute_reward(prev, account_, notional, score, price_delta, volatility, cfg_);
  done_ = account_.net_worth <= net_worth_floor() || steps_taken_ >= cfg_.max_steps;
  result.done = done_;
  result.observation = observation();
  result.info.net_worth = account_.net_worth;
  result.info.balance = account_.balance;
  result.info.shares_held = account_.shares_held;
  result.info.cumulative_profit = account_.net_worth - cfg_.initial_balance;
  return result;
}

StepOutcome TradingEnv::step(std::span<const double> action) {
  if (action.size() != 2) {
    throw DataError("TradingEnv: expected action of length 2, got " +
                    std::to_string(action.size()));
  }
  StepResult r = step(RawAction{action[0], action[1]});
  StepOutcome out;
  out.observation = std::move(r.observation);
  out.reward = r.reward;
  out.done = r.done;
  out.info = {r.info.net_worth, r.info.balance, r.info.cumulative_profit};
  return out;
}

std::vector<double> TradingEnv::observation() const {
  const ObservationFrame frame = normalize_window(series_, t_, cfg_.window);
  const double b0 = cfg_.initial_balance;
  const double close = current_close();

  std::vector<double> obs = frame.values;
  obs.reserve(observation_size());
  obs.push_back(account_.balance / b0);
  obs.push_back(account_.net_worth / b0);
  obs.push_back(account_.shares_held * close / b0);
  obs.push_back(account_.shares_held > 0.0 ? account_.cost_basis / close : 0.0);
  if (cfg_.sentiment_enabled) obs.push_back(series_.scores[t_]);
  return obs;
}

}  // namespace sentio
