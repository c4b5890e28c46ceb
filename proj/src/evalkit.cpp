#include "sentio/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "sentio/errors.hpp"
#include "sentio/svg.hpp"

namespace sentio {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open '" + path.string() + "' for writing");
  file << content;
  if (!file) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace

EpisodeMetrics run_episode(const PolicyParams& model, Environment& env,
                           std::vector<double> initial_obs, bool deterministic,
                           int max_steps, Rng& action_rng) {
  EpisodeMetrics metrics;
  const StepInfo start = env.current_info();
  metrics.step_series.push_back({start.net_worth, start.balance, start.cumulative_profit});

  const int act_dim = env.action_size();
  std::vector<double> obs = std::move(initial_obs);
  std::vector<double> action(act_dim);

  StepInfo last = start;
  for (int step = 0; step < max_steps; ++step) {
    if (deterministic) {
      action = model.actor.forward(obs);
    } else {
      action = sample_action(model, obs, action_rng).first;
    }
    for (int d = 0; d < act_dim; ++d) {
      const auto [lo, hi] = env.action_bounds(d);
      action[d] = std::clamp(action[d], lo, hi);
    }
    StepOutcome out = env.step(action);
    metrics.step_series.push_back(
        {out.info.net_worth, out.info.balance, out.info.cumulative_profit});
    last = out.info;
    obs = std::move(out.observation);
    if (out.done) break;
  }

  metrics.final_net_worth = last.net_worth;
  metrics.final_balance = last.balance;
  metrics.cumulative_profit = last.cumulative_profit;
  return metrics;
}

std::pair<std::vector<EpisodeMetrics>, SummaryStats> evaluate(
    const PolicyParams& model, const EnvFactory& env_factory, int episodes,
    int steps, std::uint64_t master_seed, bool deterministic, int jobs) {
  if (episodes < 1) throw DataError("evaluate: episodes must be >= 1");

  std::vector<EpisodeMetrics> metrics(episodes);
  auto run_range = [&](int begin, int stride) {
    auto env = env_factory();
    for (int i = begin; i < episodes; i += stride) {
      const std::uint64_t episode_seed = master_seed + static_cast<std::uint64_t>(i);
      std::vector<double> obs = env->reset(episode_seed);
      Rng action_rng(derive_seed(episode_seed, 17));
      metrics[i] = run_episode(model, *env, std::move(obs), deterministic, steps,
                               action_rng);
    }
  };

  const int workers = std::max(1, std::min(jobs, episodes));
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
    for (auto& t : pool) t.join();
  }
  return {metrics, summarize(metrics)};
}

std::vector<double> buy_and_hold(const std::vector<double>& closes, double initial) {
  if (closes.empty()) throw DataError("buy_and_hold: empty close series");
  if (closes.front() <= 0.0) throw DataError("buy_and_hold: non-positive initial close");
  std::vector<double> series;
  series.reserve(closes.size());
  for (double close : closes) series.push_back(initial * close / closes.front());
  return series;
}

DistStats dist_stats(std::vector<double> values) {
  if (values.empty()) throw DataError("dist_stats: empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();

  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return values[n - 1];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };

  DistStats stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(n);
  stats.median = quantile(0.5);
  stats.q1 = quantile(0.25);
  stats.q3 = quantile(0.75);
  stats.min = values.front();
  stats.max = values.back();
  return stats;
}

SummaryStats summarize(const std::vector<EpisodeMetrics>& metrics) {
  if (metrics.empty()) throw DataError("summarize: empty episode list");
  std::vector<double> worth, profit;
  worth.reserve(metrics.size());
  profit.reserve(metrics.size());
  for (const auto& m : metrics) {
    worth.push_back(m.final_net_worth);
    profit.push_back(m.cumulative_profit);
  }
  return {dist_stats(std::move(worth)), dist_stats(std::move(profit))};
}

std::vector<std::filesystem::path> emit_report(
    const std::string& run_label, const std::vector<EpisodeMetrics>& metrics,
    const SummaryStats& stats, const std::optional<std::vector<double>>& baseline,
    const std::filesystem::path& out_dir) {
  if (metrics.empty()) throw DataError("emit_report: no episodes to report");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  std::string episodes_csv = "episode,final_net_worth,final_balance,profit\n";
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    episodes_csv += std::to_string(i) + "," + g17(metrics[i].final_net_worth) + "," +
                    g17(metrics[i].final_balance) + "," +
                    g17(metrics[i].cumulative_profit) + "\n";
  }
  written.push_back(out_dir / "episodes.csv");
  write_file(written.back(), episodes_csv);

  std::string summary_csv = "metric,mean,median,q1,q3,min,max\n";
  auto stat_row = [&summary_csv](const char* name, const DistStats& s) {
    summary_csv += std::string(name) + "," + g17(s.mean) + "," + g17(s.median) + "," +
                   g17(s.q1) + "," + g17(s.q3) + "," + g17(s.min) + "," + g17(s.max) +
                   "\n";
  };
  stat_row("net_worth", stats.net_worth);
  stat_row("profit", stats.profit);
  written.push_back(out_dir / "summary.csv");
  write_file(written.back(), summary_csv);

  const EpisodeMetrics& last = metrics.back();
  std::string timeseries_csv = "step,net_worth,balance,profit\n";
  for (std::size_t i = 0; i < last.step_series.size(); ++i) {
    const auto& p = last.step_series[i];
    timeseries_csv += std::to_string(i) + "," + g17(p.net_worth) + "," +
                      g17(p.balance) + "," + g17(p.profit) + "\n";
  }
  written.push_back(out_dir / "timeseries.csv");
  write_file(written.back(), timeseries_csv);

  // Per-episode final net worth / profit lines.
  SvgSeries worth_series{"final net worth", {}, "#1f77b4"};
  SvgSeries profit_series{"profit", {}, "#ff7f0e"};
  for (const auto& m : metrics) {
    worth_series.values.push_back(m.final_net_worth);
    profit_series.values.push_back(m.cumulative_profit);
  }
  written.push_back(out_dir / "episodes.svg");
  write_file(written.back(),
             render_line_chart(run_label + ": net worth and profit over episodes",
                               {worth_series, profit_series}, "episode"));

  // Within-episode series (last episode), with optional baseline overlay.
  std::vector<SvgSeries> step_chart;
  SvgSeries nw{"net worth", {}, "#1f77b4"};
  SvgSeries bal{"balance", {}, "#2ca02c"};
  SvgSeries prof{"profit", {}, "#ff7f0e"};
  for (const auto& p : last.step_series) {
    nw.values.push_back(p.net_worth);
    bal.values.push_back(p.balance);
    prof.values.push_back(p.profit);
  }
  step_chart.push_back(nw);
  step_chart.push_back(bal);
  step_chart.push_back(prof);
  if (baseline) step_chart.push_back({"buy-and-hold", *baseline, "#d62728"});
  written.push_back(out_dir / "timeseries.svg");
  write_file(written.back(),
             render_line_chart(run_label + ": net worth, balance, and profit over time",
                               step_chart));

  auto box_of = [](const std::string& name, const DistStats& s) {
    return BoxSpec{name, s.min, s.q1, s.median, s.q3, s.max};
  };
  written.push_back(out_dir / "distribution.svg");
  write_file(written.back(),
             render_box_plot(run_label + ": net worth and profit distribution",
                             {box_of("net worth", stats.net_worth),
                              box_of("profit", stats.profit)}));
  return written;
}

}  // namespace sentio
