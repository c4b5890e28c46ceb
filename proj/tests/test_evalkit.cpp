#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sentio/errors.hpp"
#include "sentio/evalkit.hpp"
#include "sentio/trading_env.hpp"
#include "test_util.hpp"

using namespace sentio;

namespace {

// Actor fixed at (kind=1, amount=0): always Hold, regardless of input.
PolicyParams hold_model(int obs_dim) {
  PolicyParams params;
  params.actor = Mlp::zeros({obs_dim, 2});
  params.actor.biases[0] = {1.0, 0.0};
  params.critic = Mlp::zeros({obs_dim, 1});
  params.log_std = {-20.0, -20.0};
  return params;
}

EnvConfig flat_env_config() {
  EnvConfig cfg;
  cfg.initial_balance = 10000.0;
  cfg.window = 5;
  cfg.max_steps = 2000;
  return cfg;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  REQUIRE(file.good());
  std::stringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

EpisodeMetrics metrics_with_profit(double profit, double b0 = 10000.0) {
  EpisodeMetrics m;
  m.final_net_worth = b0 + profit;
  m.final_balance = b0;
  m.cumulative_profit = profit;
  m.step_series = {{b0, b0, 0.0}, {b0 + profit, b0, profit}};
  return m;
}

}  // namespace

TEST_CASE("run_episode with a zero-step budget reports the reset state") {
  auto series = testutil::series_from_closes("S", std::vector<double>(12, 100.0));
  TradingEnv env(series, flat_env_config());
  auto obs = env.reset(1);
  Rng rng(1);
  const auto metrics = run_episode(hold_model(29), env, obs, true, 0, rng);
  CHECK(metrics.final_net_worth == 10000.0);
  CHECK(metrics.final_balance == 10000.0);
  CHECK(metrics.cumulative_profit == 0.0);
  CHECK(metrics.step_series.size() == 1);
}

TEST_CASE("all-hold policy on constant prices stays flat") {
  auto series = testutil::series_from_closes("S", std::vector<double>(20, 100.0));
  TradingEnv env(series, flat_env_config());
  auto obs = env.reset(2);
  Rng rng(2);
  const auto metrics = run_episode(hold_model(29), env, obs, true, 10, rng);
  CHECK(metrics.cumulative_profit == 0.0);
  CHECK(metrics.step_series.size() == 11);
  for (const auto& point : metrics.step_series) {
    CHECK(point.balance == 10000.0);
    CHECK(point.net_worth == 10000.0);
  }
}

TEST_CASE("deterministic evaluation repeats exactly") {
  std::vector<double> closes;
  for (int i = 0; i < 30; ++i) closes.push_back(100.0 + 3.0 * ((i * 13) % 7));
  auto series = testutil::series_from_closes("S", closes);
  Rng init(5);
  auto model = PolicyParams::init(29, 2, {8}, init);

  const EnvFactory factory = [&series]() -> std::unique_ptr<Environment> {
    return std::make_unique<TradingEnv>(series, flat_env_config());
  };
  const auto [m1, s1] = evaluate(model, factory, 4, 25, 42, true, 1);
  const auto [m2, s2] = evaluate(model, factory, 4, 25, 42, true, 1);
  REQUIRE(m1.size() == m2.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(m1[i].final_net_worth == m2[i].final_net_worth);
    CHECK(m1[i].cumulative_profit == m2[i].cumulative_profit);
  }
  CHECK(s1.profit.mean == s2.profit.mean);
}

TEST_CASE("evaluation results are independent of the thread count") {
  std::vector<double> closes;
  for (int i = 0; i < 40; ++i) closes.push_back(80.0 + 2.0 * ((i * 31) % 11));
  auto series = testutil::series_from_closes("S", closes);
  Rng init(6);
  auto model = PolicyParams::init(29, 2, {8}, init);
  const EnvFactory factory = [&series]() -> std::unique_ptr<Environment> {
    return std::make_unique<TradingEnv>(series, flat_env_config());
  };

  const auto [m1, s1] = evaluate(model, factory, 6, 30, 7, false, 1);
  const auto [m4, s4] = evaluate(model, factory, 6, 30, 7, false, 4);
  REQUIRE(m1.size() == m4.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(m1[i].final_net_worth == m4[i].final_net_worth);
    CHECK(m1[i].final_balance == m4[i].final_balance);
  }
  CHECK(s1.net_worth.mean == s4.net_worth.mean);
}

TEST_CASE("episode profit always equals net worth minus the initial balance") {
  std::vector<double> closes;
  for (int i = 0; i < 25; ++i) closes.push_back(50.0 + ((i * 17) % 13));
  auto series = testutil::series_from_closes("S", closes);
  Rng init(7);
  auto model = PolicyParams::init(29, 2, {8}, init);
  const EnvFactory factory = [&series]() -> std::unique_ptr<Environment> {
    return std::make_unique<TradingEnv>(series, flat_env_config());
  };
  const auto [metrics, stats] = evaluate(model, factory, 8, 40, 11, false, 1);
  for (const auto& m : metrics) {
    CHECK(m.cumulative_profit == m.final_net_worth - 10000.0);
  }
}

TEST_CASE("buy_and_hold closed form") {
  const auto series = buy_and_hold({100.0, 110.0, 121.0}, 10000.0);
  REQUIRE(series.size() == 3);
  CHECK(series[0] == 10000.0);
  CHECK(series[1] == 11000.0);
  CHECK(series[2] == 12100.0);

  const auto flat = buy_and_hold({50.0, 50.0, 50.0, 50.0}, 2500.0);
  for (double v : flat) CHECK(v == 2500.0);

  CHECK_THROWS_AS(buy_and_hold({}, 1000.0), DataError);
}

TEST_CASE("buy_and_hold is linear in the stake and scale-free in prices") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 20));
    std::vector<double> closes;
    for (int i = 0; i < n; ++i) closes.push_back(rng.uniform(10.0, 500.0));
    const double initial = rng.uniform(100.0, 20000.0);
    const double k = rng.uniform(0.5, 4.0);

    const auto base = buy_and_hold(closes, initial);
    const auto scaled_stake = buy_and_hold(closes, k * initial);
    std::vector<double> scaled_prices;
    for (double c : closes) scaled_prices.push_back(k * c);
    const auto scaled_px = buy_and_hold(scaled_prices, initial);

    for (int i = 0; i < n; ++i) {
      CHECK(scaled_stake[i] == doctest::Approx(k * base[i]).epsilon(1e-12));
      CHECK(scaled_px[i] == doctest::Approx(base[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("summarize quartiles by linear interpolation") {
  std::vector<EpisodeMetrics> episodes;
  for (double p : {1.0, 2.0, 3.0, 4.0}) episodes.push_back(metrics_with_profit(p));
  const auto stats = summarize(episodes);
  CHECK(stats.profit.median == 2.5);
  CHECK(stats.profit.q1 == 1.75);
  CHECK(stats.profit.q3 == 3.25);
  CHECK(stats.profit.mean == 2.5);
  CHECK(stats.profit.min == 1.0);
  CHECK(stats.profit.max == 4.0);
}

TEST_CASE("summarize degenerate cases") {
  const auto one = summarize({metrics_with_profit(100.0)});
  CHECK(one.profit.mean == 100.0);
  CHECK(one.profit.median == 100.0);
  CHECK(one.profit.min == 100.0);
  CHECK(one.profit.max == 100.0);
  CHECK(one.profit.q1 == 100.0);
  CHECK(one.profit.q3 == 100.0);

  std::vector<EpisodeMetrics> same(5, metrics_with_profit(042.0));
  const auto s = summarize(same);
  CHECK(s.profit.mean == s.profit.median);
  CHECK(s.profit.q1 == s.profit.q3);

  const auto two = summarize({metrics_with_profit(0.0), metrics_with_profit(100.0)});
  CHECK(two.profit.mean == 50.0);
  CHECK(two.profit.median == 50.0);

  CHECK_THROWS_AS(summarize({}), DataError);
}

TEST_CASE("summarize is permutation-invariant and orders its quantiles") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 30));
    std::vector<EpisodeMetrics> episodes;
    for (int i = 0; i < n; ++i) {
      episodes.push_back(metrics_with_profit(rng.uniform(-2000.0, 4000.0)));
    }
    const auto s1 = summarize(episodes);
    // Deterministic shuffle.
    for (std::size_t i = episodes.size(); i > 1; --i) {
      std::swap(episodes[i - 1], episodes[rng.uniform_int(0, i - 1)]);
    }
    const auto s2 = summarize(episodes);
    CHECK(s1.profit.mean == s2.profit.mean);
    CHECK(s1.profit.median == s2.profit.median);
    CHECK(s1.profit.q1 == s2.profit.q1);
    CHECK(s1.profit.q3 == s2.profit.q3);

    CHECK(s1.profit.min <= s1.profit.q1);
    CHECK(s1.profit.q1 <= s1.profit.median);
    CHECK(s1.profit.median <= s1.profit.q3);
    CHECK(s1.profit.q3 <= s1.profit.max);
  }
}

TEST_CASE("emit_report writes the full file set deterministically") {
  const auto dir = std::filesystem::temp_directory_path() / "sentio_evalkit_report";
  std::filesystem::remove_all(dir);

  EpisodeMetrics m = metrics_with_profit(250.0);
  m.step_series.push_back({10250.0, 10000.0, 250.0});
  const std::vector<EpisodeMetrics> metrics{m};
  const auto stats = summarize(metrics);

  const auto files = emit_report("test-run", metrics, stats, std::nullopt, dir);
  REQUIRE(files.size() == 6);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));

  const std::string episodes = slurp(dir / "episodes.csv");
  CHECK(episodes.find("episode,final_net_worth,final_balance,profit\n") == 0);
  CHECK(std::count(episodes.begin(), episodes.end(), '\n') == 2);  // header + 1 row

  const std::string timeseries = slurp(dir / "timeseries.csv");
  CHECK(std::count(timeseries.begin(), timeseries.end(), '\n') ==
        1 + static_cast<long>(m.step_series.size()));

  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.find("net_worth,") != std::string::npos);
  CHECK(summary.find("profit,") != std::string::npos);

  // Byte-identical on a second run.
  const std::string svg_before = slurp(dir / "timeseries.svg");
  emit_report("test-run", metrics, stats, std::nullopt, dir);
  CHECK(slurp(dir / "episodes.csv") == episodes);
  CHECK(slurp(dir / "timeseries.csv") == timeseries);
  CHECK(slurp(dir / "summary.csv") == summary);
  CHECK(slurp(dir / "timeseries.svg") == svg_before);
  CHECK(svg_before.find("buy-and-hold") == std::string::npos);

  // Baseline overlay adds the comparison series.
  emit_report("test-run", metrics, stats,
              std::vector<double>{10000.0, 10100.0, 10200.0}, dir);
  CHECK(slurp(dir / "timeseries.svg").find("buy-and-hold") != std::string::npos);
}

TEST_CASE("episodes.csv round-trips the in-memory values exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "sentio_evalkit_roundtrip";
  std::filesystem::remove_all(dir);

  Rng rng(14);
  std::vector<EpisodeMetrics> metrics;
  for (int i = 0; i < 7; ++i) {
    EpisodeMetrics m = metrics_with_profit(rng.uniform(-1234.5678, 9876.123));
    m.final_balance = rng.uniform(0.0, 20000.0);
    metrics.push_back(m);
  }
  emit_report("rt", metrics, summarize(metrics), std::nullopt, dir);

  std::ifstream file(dir / "episodes.csv");
  std::string line;
  std::getline(file, line);  // header
  for (const auto& m : metrics) {
    REQUIRE(std::getline(file, line));
    std::stringstream ss(line);
    std::string episode, worth, balance, profit;
    std::getline(ss, episode, ',');
    std::getline(ss, worth, ',');
    std::getline(ss, balance, ',');
    std::getline(ss, profit, ',');
    CHECK(std::stod(worth) == m.final_net_worth);
    CHECK(std::stod(balance) == m.final_balance);
    CHECK(std::stod(profit) == m.cumulative_profit);
  }
}
