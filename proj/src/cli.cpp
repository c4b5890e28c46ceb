#include "sentio/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "sentio/errors.hpp"
#include "sentio/evalkit.hpp"
#include "sentio/portfolio_env.hpp"
#include "sentio/ppo.hpp"
#include "sentio/sentiment.hpp"
#include "sentio/trading_env.hpp"

namespace sentio::cli {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open '" + path.string() + "' for writing");
  file << content;
  if (!file) throw DataError("write failed for '" + path.string() + "'");
}

EnvConfig effective_env_config(const RunConfig& cfg) {
  EnvConfig env = cfg.env;
  env.sentiment_enabled = cfg.sentiment_enabled;
  if (!env.net_worth_floor_frac) {
    env.net_worth_floor_frac = cfg.mode == "portfolio" ? 0.1 : 0.0;
  }
  env.seed = derive_seed(cfg.seed, 11);
  return env;
}

EnvFactory make_env_factory(const RunConfig& cfg, const LoadedData& data) {
  const EnvConfig env_cfg = effective_env_config(cfg);
  if (cfg.mode == "single") {
    AssetSeries series = data.dataset.assets.front();
    return [series, env_cfg]() -> std::unique_ptr<Environment> {
      return std::make_unique<TradingEnv>(series, env_cfg);
    };
  }
  MarketDataset dataset = data.dataset;
  return [dataset, env_cfg]() -> std::unique_ptr<Environment> {
    return std::make_unique<PortfolioEnv>(dataset, env_cfg);
  };
}

std::vector<double> hold_series(const RunConfig& cfg, const MarketDataset& dataset) {
  const double b0 = cfg.env.initial_balance;
  if (cfg.mode == "single" || dataset.assets.size() == 1) {
    std::vector<double> closes;
    for (const auto& bar : dataset.assets.front().bars) closes.push_back(bar.close);
    return buy_and_hold(closes, b0);
  }
  // Equal-dollar split across assets at t0.
  const double slice = b0 / static_cast<double>(dataset.assets.size());
  std::vector<double> total(dataset.length(), 0.0);
  for (const auto& asset : dataset.assets) {
    std::vector<double> closes;
    for (const auto& bar : asset.bars) closes.push_back(bar.close);
    const std::vector<double> leg = buy_and_hold(closes, slice);
    for (std::size_t i = 0; i < leg.size(); ++i) total[i] += leg[i];
  }
  return total;
}

std::string run_label(const RunConfig& cfg) {
  const auto name = std::filesystem::path(cfg.out_dir).filename().string();
  return name.empty() ? cfg.out_dir : name;
}

std::string dollars(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "$%.2f", v);
  return buf;
}

}  // namespace

LoadedData load_dataset(const RunConfig& cfg) {
  validate_config(cfg);

  std::map<std::string, std::map<std::string, SentimentLabel>> sentiment;
  if (!cfg.sentiment_csv.empty()) {
    // Absent sentiment is neutral-filled, not an error; a wrong path still
    // gets flagged on stderr.
    if (std::filesystem::exists(cfg.sentiment_csv)) {
      sentiment = parse_sentiment_csv(read_file(cfg.sentiment_csv));
    } else {
      std::cerr << "warning: sentiment file '" << cfg.sentiment_csv
                << "' not found; filling neutral scores\n";
    }
  }

  std::vector<AssetSeries> series;
  for (const auto& symbol : cfg.symbols) {
    const std::filesystem::path path =
        std::filesystem::path(cfg.data_dir) / (symbol + ".csv");
    if (!std::filesystem::exists(path)) {
      if (cfg.mode == "single") {
        throw DataError("missing OHLCV file '" + path.string() + "'");
      }
      std::cerr << "warning: skipping " << symbol << " (no file at " << path.string()
                << ")\n";
      continue;
    }
    std::vector<OhlcvBar> bars;
    try {
      bars = parse_ohlcv_csv(read_file(path));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    const auto it = sentiment.find(symbol);
    series.push_back(merge_series(
        symbol, std::move(bars),
        it == sentiment.end() ? std::map<std::string, SentimentLabel>{} : it->second));
  }
  if (series.empty()) {
    throw DataError("no OHLCV files found under '" + cfg.data_dir + "'");
  }

  LoadedData data;
  data.dataset =
      align_dataset(std::move(series), static_cast<std::size_t>(cfg.env.window) + 2);

  for (const auto& asset : data.dataset.assets) {
    std::size_t covered = 0;
    const auto it = sentiment.find(asset.symbol);
    if (it != sentiment.end()) {
      for (const auto& bar : asset.bars) covered += it->second.count(bar.date);
    }
    data.sentiment_covered[asset.symbol] = covered;
  }
  return data;
}

void write_effective_config(const RunConfig& cfg) {
  write_file(std::filesystem::path(cfg.out_dir) / "effective_config",
             render_config(cfg));
}

void cmd_ingest(const RunConfig& cfg) {
  const LoadedData data = load_dataset(cfg);
  const auto& assets = data.dataset.assets;
  const std::size_t days = data.dataset.length();

  std::string report;
  std::string symbols;
  for (const auto& a : assets) {
    if (!symbols.empty()) symbols += ",";
    symbols += a.symbol;
  }
  report += "symbols: " + symbols + "\n";
  report += "date_range: " + assets.front().bars.front().date + " .. " +
            assets.front().bars.back().date + "\n";
  report += "days: " + std::to_string(days) + "\n";

  char buf[64];
  std::size_t covered_total = 0;
  for (const auto& a : assets) {
    const std::size_t covered = data.sentiment_covered.at(a.symbol);
    covered_total += covered;
    const double fill = 1.0 - static_cast<double>(covered) / days;
    std::snprintf(buf, sizeof(buf), "%.6f", fill);
    report += a.symbol + ": bars=" + std::to_string(a.size()) +
              " sentiment_days=" + std::to_string(covered) + " neutral_fill_ratio=" +
              buf + "\n";
  }
  const double overall =
      1.0 - static_cast<double>(covered_total) / (days * assets.size());
  std::snprintf(buf, sizeof(buf), "%.6f", overall);
  report += "overall_neutral_fill_ratio=" + std::string(buf) + "\n";

  const auto path = std::filesystem::path(cfg.out_dir) / "dataset.check";
  write_file(path, report);
  write_effective_config(cfg);
  std::cout << report;
  std::cout << "wrote " << path.string() << "\n";
}

std::filesystem::path cmd_label(const RunConfig& cfg) {
  if (cfg.news_csv.empty()) {
    throw ConfigError("label: config key 'news_csv' is required");
  }
  const auto rows = parse_news_csv(read_file(cfg.news_csv));
  const LexiconProvider provider;
  const std::string csv = label_news(rows, provider);

  const std::filesystem::path out =
      cfg.sentiment_csv.empty()
          ? std::filesystem::path(cfg.out_dir) / "sentiment.csv"
          : std::filesystem::path(cfg.sentiment_csv);
  write_file(out, csv);
  write_effective_config(cfg);
  std::cout << "labeled " << rows.size() << " news rows -> " << out.string() << "\n";
  return out;
}

void cmd_train(const RunConfig& cfg) {
  const LoadedData data = load_dataset(cfg);
  const EnvFactory factory = make_env_factory(cfg, data);

  PpoConfig ppo_cfg = cfg.ppo;
  ppo_cfg.seed = derive_seed(cfg.seed, 10);
  const TrainResult result = train(factory, ppo_cfg);

  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);
  save_model(result.params, out_dir / "model.txt");
  write_training_log_csv(result.log, out_dir / "training_log.csv");
  write_effective_config(cfg);

  std::cout << "trained " << ppo_cfg.total_timesteps << " timesteps over "
            << result.log.size() << " iterations\n";
  if (!result.log.empty()) {
    std::cout << "final mean episode reward: " << result.log.back().mean_ep_reward
              << "\n";
  }
  std::cout << "wrote " << (out_dir / "model.txt").string() << "\n";
}

void cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& model_path) {
  const LoadedData data = load_dataset(cfg);
  const EnvFactory factory = make_env_factory(cfg, data);
  const PolicyParams model = load_model(model_path);

  const auto probe = factory();
  if (model.obs_dim() != probe->observation_size()) {
    throw ConfigError("model/env observation dimension mismatch: model expects " +
                      std::to_string(model.obs_dim()) + ", environment provides " +
                      std::to_string(probe->observation_size()));
  }
  if (model.action_dim() != probe->action_size()) {
    throw ConfigError("model/env action dimension mismatch: model expects " +
                      std::to_string(model.action_dim()) + ", environment provides " +
                      std::to_string(probe->action_size()));
  }

  const auto [metrics, stats] =
      evaluate(model, factory, cfg.eval.episodes, cfg.eval.steps, cfg.seed,
               cfg.eval.deterministic, cfg.jobs);

  emit_report(run_label(cfg), metrics, stats, hold_series(cfg, data.dataset),
              cfg.out_dir);
  write_effective_config(cfg);

  std::cout << "episodes: " << metrics.size() << "\n";
  std::cout << "mean net worth: " << dollars(stats.net_worth.mean)
            << "  mean profit: " << dollars(stats.profit.mean) << "\n";
  std::cout << "wrote report to " << cfg.out_dir << "\n";
}

void cmd_baseline(const RunConfig& cfg) {
  const LoadedData data = load_dataset(cfg);
  const std::vector<double> series = hold_series(cfg, data.dataset);
  const double b0 = cfg.env.initial_balance;

  EpisodeMetrics metrics;
  for (double worth : series) {
    metrics.step_series.push_back({worth, 0.0, worth - b0});
  }
  metrics.final_net_worth = series.back();
  metrics.final_balance = 0.0;
  metrics.cumulative_profit = series.back() - b0;

  const std::vector<EpisodeMetrics> all{metrics};
  emit_report(run_label(cfg) + " buy-and-hold", all, summarize(all), std::nullopt,
              cfg.out_dir);
  write_effective_config(cfg);

  std::cout << "buy-and-hold final net worth: " << dollars(metrics.final_net_worth)
            << "  profit: " << dollars(metrics.cumulative_profit) << "\n";
  std::cout << "wrote report to " << cfg.out_dir << "\n";
}

void cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                 const std::filesystem::path& out_dir) {
  struct Row {
    std::string name;
    double profit = 0.0;
    double net_worth = 0.0;
  };
  std::vector<Row> rows;

  for (const auto& dir : run_dirs) {
    const auto summary_path = dir / "summary.csv";
    if (!std::filesystem::exists(summary_path)) {
      throw DataError("run dir '" + dir.string() + "' lacks summary.csv");
    }
    Row row;
    row.name = dir.filename().string().empty() ? dir.string() : dir.filename().string();

    std::ifstream file(summary_path);
    std::string line;
    std::getline(file, line);  // header
    while (std::getline(file, line)) {
      std::stringstream ss(line);
      std::string metric, mean;
      std::getline(ss, metric, ',');
      std::getline(ss, mean, ',');
      if (metric == "net_worth") row.net_worth = std::stod(mean);
      if (metric == "profit") row.profit = std::stod(mean);
    }
    rows.push_back(row);
  }

  std::string csv = "run,average_profit,average_net_worth\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", row.name.c_str(), row.profit,
                  row.net_worth);
    csv += buf;
  }
  const auto out_path = out_dir / "compare.csv";
  write_file(out_path, csv);

  std::size_t width = 12;
  for (const auto& row : rows) width = std::max(width, row.name.size() + 2);
  std::cout << std::string(width, ' ') << "Average Profit  Average Net Worth\n";
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s%14s  %17s\n", static_cast<int>(width),
                  row.name.c_str(), dollars(row.profit).c_str(),
                  dollars(row.net_worth).c_str());
    std::cout << buf;
  }
  std::cout << "wrote " << out_path.string() << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"sentio: sentiment-enhanced RL trading toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int jobs = 0;
  app.add_option("--config", config_path, "run configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed override");
  auto* out_opt = app.add_option("--out", out_dir, "output directory override");
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (1 = bit-exact)");

  auto* ingest = app.add_subcommand("ingest", "validate, merge, and align the dataset");
  auto* label = app.add_subcommand("label", "score news text with the lexicon provider");
  auto* train_cmd = app.add_subcommand("train", "train a PPO policy");
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a trained model");
  std::string model_path;
  eval_cmd->add_option("--model", model_path, "model file (default: <out_dir>/model.txt)");
  auto* baseline = app.add_subcommand("baseline", "buy-and-hold benchmark report");
  std::vector<std::string> compare_dirs;
  auto* compare = app.add_subcommand("compare", "tabulate summaries of completed runs");
  compare->add_option("dirs", compare_dirs, "run directories")->expected(-2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (compare->parsed()) {
      if (compare_dirs.size() < 2) {
        throw ConfigError("compare: need at least 2 run directories");
      }
      std::vector<std::filesystem::path> dirs(compare_dirs.begin(), compare_dirs.end());
      cmd_compare(dirs, out_dir.empty() ? std::filesystem::path(".")
                                        : std::filesystem::path(out_dir));
      return 0;
    }

    if (config_path.empty()) {
      throw ConfigError("a --config file is required for this command");
    }
    RunConfig cfg = parse_config_file(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt->count() > 0) cfg.out_dir = out_dir;
    if (jobs_opt->count() > 0) cfg.jobs = jobs;
    validate_config(cfg);

    if (ingest->parsed()) {
      cmd_ingest(cfg);
    } else if (label->parsed()) {
      cmd_label(cfg);
    } else if (train_cmd->parsed()) {
      cmd_train(cfg);
    } else if (eval_cmd->parsed()) {
      const std::filesystem::path model =
          model_path.empty() ? std::filesystem::path(cfg.out_dir) / "model.txt"
                             : std::filesystem::path(model_path);
      cmd_evaluate(cfg, model);
    } else if (baseline->parsed()) {
      cmd_baseline(cfg);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sentio::cli
