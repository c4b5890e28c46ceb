#include "sentio/config.hpp"

#include <algorithm>
#include <cmath>
#include <cerrno>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sentio/errors.hpp"

namespace sentio {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
  return n;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
      value.find('-') != std::string::npos) {
    throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" +
                      value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line = trim(nl == std::string_view::npos ? text.substr(pos)
                                                         : text.substr(pos, nl - pos));
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "data_dir") cfg.data_dir = value;
    else if (key == "symbols") cfg.symbols = to_list(value);
    else if (key == "mode") cfg.mode = value;
    else if (key == "sentiment_enabled") cfg.sentiment_enabled = to_bool(key, value);
    else if (key == "sentiment_csv") cfg.sentiment_csv = value;
    else if (key == "news_csv") cfg.news_csv = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "jobs") cfg.jobs = static_cast<int>(to_long(key, value));
    else if (key == "env.initial_balance") cfg.env.initial_balance = to_double(key, value);
    else if (key == "env.window") cfg.env.window = static_cast<int>(to_long(key, value));
    else if (key == "env.max_steps") cfg.env.max_steps = static_cast<int>(to_long(key, value));
    else if (key == "env.tx_cost_rate") cfg.env.tx_cost_rate = to_double(key, value);
    else if (key == "env.stability_coef") cfg.env.stability_coef = to_double(key, value);
    else if (key == "env.sentiment_coef") cfg.env.sentiment_coef = to_double(key, value);
    else if (key == "env.vol_damping") cfg.env.vol_damping = to_double(key, value);
    else if (key == "env.net_worth_floor_frac")
      cfg.env.net_worth_floor_frac = to_double(key, value);
    else if (key == "ppo.gamma") cfg.ppo.gamma = to_double(key, value);
    else if (key == "ppo.gae_lambda") cfg.ppo.gae_lambda = to_double(key, value);
    else if (key == "ppo.clip_eps") cfg.ppo.clip_eps = to_double(key, value);
    else if (key == "ppo.learning_rate") cfg.ppo.learning_rate = to_double(key, value);
    else if (key == "ppo.rollout_horizon")
      cfg.ppo.rollout_horizon = static_cast<int>(to_long(key, value));
    else if (key == "ppo.update_epochs")
      cfg.ppo.update_epochs = static_cast<int>(to_long(key, value));
    else if (key == "ppo.minibatch_size")
      cfg.ppo.minibatch_size = static_cast<int>(to_long(key, value));
    else if (key == "ppo.value_coef") cfg.ppo.value_coef = to_double(key, value);
    else if (key == "ppo.entropy_coef") cfg.ppo.entropy_coef = to_double(key, value);
    else if (key == "ppo.grad_clip_norm") cfg.ppo.grad_clip_norm = to_double(key, value);
    else if (key == "ppo.total_timesteps") cfg.ppo.total_timesteps = to_long(key, value);
    else if (key == "ppo.hidden_sizes") {
      cfg.ppo.hidden_sizes.clear();
      for (const auto& item : to_list(value)) {
        cfg.ppo.hidden_sizes.push_back(static_cast<int>(to_long(key, item)));
      }
    } else if (key == "ppo.optimizer") cfg.ppo.optimizer = value;
    else if (key == "eval.episodes") cfg.eval.episodes = static_cast<int>(to_long(key, value));
    else if (key == "eval.steps") cfg.eval.steps = static_cast<int>(to_long(key, value));
    else if (key == "eval.deterministic") cfg.eval.deterministic = to_bool(key, value);
    else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };

  kv("data_dir", cfg.data_dir);
  std::string symbols;
  for (const auto& s : cfg.symbols) {
    if (!symbols.empty()) symbols += ",";
    symbols += s;
  }
  kv("symbols", symbols);
  kv("mode", cfg.mode);
  kv("sentiment_enabled", cfg.sentiment_enabled ? "true" : "false");
  if (!cfg.sentiment_csv.empty()) kv("sentiment_csv", cfg.sentiment_csv);
  if (!cfg.news_csv.empty()) kv("news_csv", cfg.news_csv);
  kv("out_dir", cfg.out_dir);
  kv("seed", std::to_string(cfg.seed));
  kv("jobs", std::to_string(cfg.jobs));

  kv("env.initial_balance", g17(cfg.env.initial_balance));
  kv("env.window", std::to_string(cfg.env.window));
  kv("env.max_steps", std::to_string(cfg.env.max_steps));
  kv("env.tx_cost_rate", g17(cfg.env.tx_cost_rate));
  kv("env.stability_coef", g17(cfg.env.stability_coef));
  kv("env.sentiment_coef", g17(cfg.env.sentiment_coef));
  kv("env.vol_damping", g17(cfg.env.vol_damping));
  kv("env.net_worth_floor_frac",
     g17(cfg.env.net_worth_floor_frac.value_or(cfg.mode == "portfolio" ? 0.1 : 0.0)));

  kv("ppo.gamma", g17(cfg.ppo.gamma));
  kv("ppo.gae_lambda", g17(cfg.ppo.gae_lambda));
  kv("ppo.clip_eps", g17(cfg.ppo.clip_eps));
  kv("ppo.learning_rate", g17(cfg.ppo.learning_rate));
  kv("ppo.rollout_horizon", std::to_string(cfg.ppo.rollout_horizon));
  kv("ppo.update_epochs", std::to_string(cfg.ppo.update_epochs));
  kv("ppo.minibatch_size", std::to_string(cfg.ppo.minibatch_size));
  kv("ppo.value_coef", g17(cfg.ppo.value_coef));
  kv("ppo.entropy_coef", g17(cfg.ppo.entropy_coef));
  kv("ppo.grad_clip_norm", g17(cfg.ppo.grad_clip_norm));
  kv("ppo.total_timesteps", std::to_string(cfg.ppo.total_timesteps));
  std::string hidden;
  for (int h : cfg.ppo.hidden_sizes) {
    if (!hidden.empty()) hidden += ",";
    hidden += std::to_string(h);
  }
  kv("ppo.hidden_sizes", hidden);
  kv("ppo.optimizer", cfg.ppo.optimizer);

  kv("eval.episodes", std::to_string(cfg.eval.episodes));
  kv("eval.steps", std::to_string(cfg.eval.steps));
  kv("eval.deterministic", cfg.eval.deterministic ? "true" : "false");
  return out;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.mode != "single" && cfg.mode != "portfolio") {
    throw ConfigError("config: mode must be 'single' or 'portfolio', got '" + cfg.mode +
                      "'");
  }
  if (cfg.symbols.empty()) throw ConfigError("config: symbols must be non-empty");
  if (cfg.mode == "single" && cfg.symbols.size() != 1) {
    throw ConfigError("config: single mode expects exactly one symbol, got " +
                      std::to_string(cfg.symbols.size()));
  }
  if (cfg.data_dir.empty()) throw ConfigError("config: data_dir is required");
  if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");

  if (cfg.env.initial_balance <= 0) throw ConfigError("config: env.initial_balance must be > 0");
  if (cfg.env.window < 2) throw ConfigError("config: env.window must be >= 2");
  if (cfg.env.max_steps < 1) throw ConfigError("config: env.max_steps must be >= 1");
  for (const auto& [name, v] :
       {std::pair{"env.tx_cost_rate", cfg.env.tx_cost_rate},
        std::pair{"env.stability_coef", cfg.env.stability_coef},
        std::pair{"env.sentiment_coef", cfg.env.sentiment_coef},
        std::pair{"env.vol_damping", cfg.env.vol_damping}}) {
    if (v < 0) throw ConfigError(std::string("config: ") + name + " must be >= 0");
  }
  if (cfg.env.net_worth_floor_frac &&
      (*cfg.env.net_worth_floor_frac < 0 || *cfg.env.net_worth_floor_frac >= 1)) {
    throw ConfigError("config: env.net_worth_floor_frac must be in [0, 1)");
  }

  if (cfg.ppo.gamma <= 0 || cfg.ppo.gamma > 1) {
    throw ConfigError("config: ppo.gamma must be in (0, 1]");
  }
  if (cfg.ppo.gae_lambda < 0 || cfg.ppo.gae_lambda > 1) {
    throw ConfigError("config: ppo.gae_lambda must be in [0, 1]");
  }
  if (cfg.ppo.clip_eps <= 0) throw ConfigError("config: ppo.clip_eps must be > 0");
  if (cfg.ppo.learning_rate <= 0) throw ConfigError("config: ppo.learning_rate must be > 0");
  if (cfg.ppo.rollout_horizon < 1) throw ConfigError("config: ppo.rollout_horizon must be >= 1");
  if (cfg.ppo.update_epochs < 1) throw ConfigError("config: ppo.update_epochs must be >= 1");
  if (cfg.ppo.minibatch_size < 1) throw ConfigError("config: ppo.minibatch_size must be >= 1");
  if (cfg.ppo.total_timesteps < 1) throw ConfigError("config: ppo.total_timesteps must be >= 1");
  if (cfg.ppo.hidden_sizes.empty()) throw ConfigError("config: ppo.hidden_sizes must be non-empty");
  for (int h : cfg.ppo.hidden_sizes) {
    if (h < 1) throw ConfigError("config: ppo.hidden_sizes entries must be >= 1");
  }
  if (cfg.ppo.optimizer != "sgd" && cfg.ppo.optimizer != "adam") {
    throw ConfigError("config: ppo.optimizer must be 'sgd' or 'adam', got '" +
                      cfg.ppo.optimizer + "'");
  }
  if (cfg.eval.episodes < 1) throw ConfigError("config: eval.episodes must be >= 1");
  if (cfg.eval.steps < 0) throw ConfigError("config: eval.steps must be >= 0");
}

}  // namespace sentio
