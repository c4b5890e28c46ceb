#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sentio/env.hpp"
#include "sentio/ppo.hpp"
#include "sentio/rng.hpp"

namespace sentio {

/// End-of-episode results plus the per-step account series (index 0 is the
/// reset state). cumulative_profit is final_net_worth - initial_balance.
struct EpisodeMetrics {
  double final_net_worth = 0.0;
  double final_balance = 0.0;
  double cumulative_profit = 0.0;
  struct Point {
    double net_worth = 0.0;
    double balance = 0.0;
    double profit = 0.0;
  };
  std::vector<Point> step_series;
};

struct DistStats {
  double mean = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
};

struct SummaryStats {
  DistStats net_worth;
  DistStats profit;
};

/// Plays one episode on an already-reset environment: policy mean when
/// `deterministic`, sampled actions otherwise, always clipped into the
/// action bounds. Stops at env done or `max_steps`.
EpisodeMetrics run_episode(const PolicyParams& model, Environment& env,
                           std::vector<double> initial_obs, bool deterministic,
                           int max_steps, Rng& action_rng);

/// Runs `episodes` episodes of at most `steps` steps. Episode i resets its
/// environment with seed master_seed + i, so results are independent of
/// `jobs` (threads) and ordered by episode index.
std::pair<std::vector<EpisodeMetrics>, SummaryStats> evaluate(
    const PolicyParams& model, const EnvFactory& env_factory, int episodes,
    int steps, std::uint64_t master_seed, bool deterministic = false, int jobs = 1);

/// Buy-and-hold equity curve: nw_t = initial * closes[t] / closes[0].
std::vector<double> buy_and_hold(const std::vector<double>& closes, double initial);

/// Distribution statistics with quartiles by linear interpolation between
/// order statistics.
SummaryStats summarize(const std::vector<EpisodeMetrics>& metrics);
DistStats dist_stats(std::vector<double> values);

/// Writes episodes.csv, summary.csv, timeseries.csv (last episode) and the
/// three SVG charts under out_dir; overlays `baseline` (a net-worth series)
/// on the timeseries chart when provided. Returns the written paths.
/// Byte-identical output for identical inputs.
std::vector<std::filesystem::path> emit_report(
    const std::string& run_label, const std::vector<EpisodeMetrics>& metrics,
    const SummaryStats& stats, const std::optional<std::vector<double>>& baseline,
    const std::filesystem::path& out_dir);

}  // namespace sentio
