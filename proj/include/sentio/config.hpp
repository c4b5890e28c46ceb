#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sentio/env.hpp"
#include "sentio/ppo.hpp"

namespace sentio {

struct EvalConfig {
  int episodes = 100;
  int steps = 2000;
  bool deterministic = false;
};

/// Everything a run needs, loaded from a flat `key = value` config file
/// with dotted section prefixes (env.*, ppo.*, eval.*).
struct RunConfig {
  std::string data_dir;
  std::vector<std::string> symbols;
  std::string mode = "single";  // "single" | "portfolio"
  bool sentiment_enabled = false;
  std::string sentiment_csv;  // optional; read by ingest/train/evaluate
  std::string news_csv;       // optional; input of the label command
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  EnvConfig env;
  PpoConfig ppo;
  EvalConfig eval;
};

RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Renders the effective config (defaults materialized) in the same flat
/// format; parse_config_text(render_config(c)) reproduces c.
std::string render_config(const RunConfig& cfg);

/// Structural checks (mode value, symbol count, coefficient signs...).
/// Throws ConfigError.
void validate_config(const RunConfig& cfg);

}  // namespace sentio
