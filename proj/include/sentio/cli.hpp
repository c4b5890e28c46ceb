#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentio/config.hpp"
#include "sentio/marketdata.hpp"

namespace sentio::cli {

/// Aligned dataset plus, per symbol, how many aligned days carried a real
/// sentiment label (the rest were neutral-filled).
struct LoadedData {
  MarketDataset dataset;
  std::map<std::string, std::size_t> sentiment_covered;
};

/// Reads `<SYMBOL>.csv` per configured symbol from data_dir, merges the
/// optional sentiment CSV, and aligns on the shared dates. In portfolio
/// mode symbols without a file are skipped with a warning; in single mode
/// a missing file is an error.
LoadedData load_dataset(const RunConfig& cfg);

void write_effective_config(const RunConfig& cfg);

void cmd_ingest(const RunConfig& cfg);
std::filesystem::path cmd_label(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& model_path);
void cmd_baseline(const RunConfig& cfg);
void cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                 const std::filesystem::path& out_dir);

/// Full command-line entry point. Exit codes: 0 success, 2 config error,
/// 3 data error, 4 numeric failure, 1 anything else.
int run(int argc, char** argv);

}  // namespace sentio::cli
