#include "sentio/portfolio_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sentio/errors.hpp"

namespace sentio {

PortfolioEnv::PortfolioEnv(MarketDataset dataset, EnvConfig cfg)
    : dataset_(std::move(dataset)), cfg_(cfg), rng_(cfg.seed) {
  if (cfg_.window < 2) throw DataError("PortfolioEnv: window must be >= 2");
  if (dataset_.assets.empty()) throw DataError("PortfolioEnv: empty dataset");

  const auto& first = dataset_.assets.front();
  if (static_cast<int>(first.size()) < cfg_.window + 2) {
    throw DataError("PortfolioEnv: dataset has " + std::to_string(first.size()) +
                    " days, need at least " + std::to_string(cfg_.window + 2));
  }
  for (const auto& asset : dataset_.assets) {
    if (asset.size() != first.size() || asset.scores.size() != asset.bars.size()) {
      throw DataError("PortfolioEnv: dataset not aligned for '" + asset.symbol + "'");
    }
    for (std::size_t i = 0; i < asset.size(); ++i) {
      if (asset.bars[i].date != first.bars[i].date) {
        throw DataError("PortfolioEnv: dataset not aligned for '" + asset.symbol + "'");
      }
    }
  }

  execution_order_.resize(dataset_.assets.size());
  std::iota(execution_order_.begin(), execution_order_.end(), 0);
  std::sort(execution_order_.begin(), execution_order_.end(), [this](int a, int b) {
    return dataset_.assets[a].symbol < dataset_.assets[b].symbol;
  });
}

int PortfolioEnv::row_width() const {
  return cfg_.window * 5 + 3 + (cfg_.sentiment_enabled ? 1 : 0);
}

int PortfolioEnv::observation_size() const {
  return asset_count() * row_width() + 1;
}

double PortfolioEnv::net_worth_floor() const {
  return cfg_.net_worth_floor_frac.value_or(0.1) * cfg_.initial_balance;
}

std::vector<double> PortfolioEnv::reset() { return reset_internal(); }

std::vector<double> PortfolioEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset_internal();
}

std::vector<double> PortfolioEnv::reset_internal() {
  const int len = static_cast<int>(dataset_.length());
  t_ = static_cast<int>(rng_.uniform_int(cfg_.window - 1, len - 2));
  account_.initial_balance = cfg_.initial_balance;
  account_.balance = cfg_.initial_balance;
  account_.positions.assign(dataset_.assets.size(), Position{});
  account_.net_worth = cfg_.initial_balance;
  steps_taken_ = 0;
  done_ = false;
  return observation();
}

double PortfolioEnv::mark_net_worth() const {
  double worth = account_.balance;
  for (std::size_t i = 0; i < dataset_.assets.size(); ++i) {
    worth += account_.positions[i].shares_held * dataset_.assets[i].bars[t_].close;
  }
  return worth;
}

PortfolioStepResult PortfolioEnv::step(const std::vector<double>& action) {
  if (done_) throw std::logic_error("PortfolioEnv::step: episode already finished");
  const int n = asset_count();
  if (static_cast<int>(action.size()) != 2 * n) {
    throw DataError("PortfolioEnv: expected action of length " + std::to_string(2 * n) +
                    ", got " + std::to_string(action.size()));
  }

  std::vector<TradeDecision> decisions(n);
  for (int i = 0; i < n; ++i) {
    decisions[i] = decode_action(RawAction{action[2 * i], action[2 * i + 1]});
    if (cfg_.sentiment_enabled) {
      decisions[i] = apply_sentiment_bias(decisions[i], dataset_.assets[i].scores[t_]);
    }
  }

  const double prev_net_worth = account_.net_worth;
  std::vector<double> volatility(n);
  for (int i = 0; i < n; ++i) {
    volatility[i] = rolling_volatility(dataset_.assets[i], t_, cfg_.window);
  }

  // Sells free cash before any buy; both passes walk assets in symbol order.
  double notional_sum = 0.0;
  auto run_pass = [&](TradeSide side) {
    for (int i : execution_order_) {
      if (decisions[i].side != side) continue;
      AccountState slot;
      slot.balance = account_.balance;
      slot.shares_held = account_.positions[i].shares_held;
      slot.cost_basis = account_.positions[i].cost_basis;
      notional_sum += execute_trade(slot, decisions[i], dataset_.assets[i].bars[t_].close);
      account_.balance = slot.balance;
      account_.positions[i].shares_held = slot.shares_held;
      account_.positions[i].cost_basis = slot.cost_basis;
    }
  };
  run_pass(TradeSide::Sell);
  run_pass(TradeSide::Buy);

  const int old_t = t_;
  const int len = static_cast<int>(dataset_.length());
  t_ = (t_ == len - 1) ? cfg_.window - 1 : t_ + 1;
  ++steps_taken_;

  account_.net_worth = mark_net_worth();

  double align_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& asset = dataset_.assets[i];
    const double delta = asset.bars[t_].close - asset.bars[t_ - 1].close;
    align_sum +=
        alignment_bonus(asset.scores[old_t], delta, volatility[i], cfg_.vol_damping);
  }
  const double align_term = cfg_.sentiment_enabled ? align_sum / n : 0.0;

  PortfolioStepResult result;
  result.reward = reward_from_terms(account_.net_worth - prev_net_worth,
                                    account_.balance, notional_sum, align_term, cfg_);
  done_ = account_.net_worth <= net_worth_floor() || steps_taken_ >= cfg_.max_steps;
  result.done = done_;
  result.observation = observation();
  result.info.net_worth = account_.net_worth;
  result.info.balance = account_.balance;
  result.info.holdings.reserve(n);
  for (const auto& pos : account_.positions) result.info.holdings.push_back(pos.shares_held);
  result.info.cumulative_profit = account_.net_worth - cfg_.initial_balance;
  return result;
}

StepOutcome PortfolioEnv::step(std::span<const double> action) {
  PortfolioStepResult r = step(std::vector<double>(action.begin(), action.end()));
  StepOutcome out;
  out.observation = std::move(r.observation);
  out.reward = r.reward;
  out.done = r.done;
  out.info = {r.info.net_worth, r.info.balance, r.info.cumulative_profit};
  return out;
}

std::vector<double> PortfolioEnv::observation() const {
  const double b0 = cfg_.initial_balance;
  std::vector<double> obs;
  obs.reserve(observation_size());
  for (int i = 0; i < asset_count(); ++i) {
    const auto& asset = dataset_.assets[i];
    const auto& pos = account_.positions[i];
    const double close = asset.bars[t_].close;
    const ObservationFrame frame = normalize_window(asset, t_, cfg_.window);
    obs.insert(obs.end(), frame.values.begin(), frame.values.end());
    obs.push_back(pos.shares_held * close / b0);
    obs.push_back(pos.shares_held > 0.0 ? pos.cost_basis / close : 0.0);
    obs.push_back(account_.balance / b0);
    if (cfg_.sentiment_enabled) obs.push_back(asset.scores[t_]);
  }
  obs.push_back(account_.net_worth / b0);
  return obs;
}

}  // namespace sentio
