#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "sentio/marketdata.hpp"

namespace sentio::testutil {

// Valid ascending ISO dates for synthetic series (up to ~9k indices).
inline std::string date_for(int i) {
  const int day = 1 + i % 28;
  const int month = 1 + (i / 28) % 12;
  const int year = 2020 + i / (28 * 12);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

inline std::vector<OhlcvBar> bars_from_closes(const std::vector<double>& closes,
                                              double volume = 1000.0) {
  std::vector<OhlcvBar> bars;
  bars.reserve(closes.size());
  for (std::size_t i = 0; i < closes.size(); ++i) {
    OhlcvBar bar;
    bar.date = date_for(static_cast<int>(i));
    bar.open = bar.high = bar.low = bar.close = closes[i];
    bar.volume = volume;
    bars.push_back(bar);
  }
  return bars;
}

inline AssetSeries series_from_closes(std::string symbol,
                                      const std::vector<double>& closes,
                                      std::vector<double> scores = {}) {
  AssetSeries series;
  series.symbol = std::move(symbol);
  series.bars = bars_from_closes(closes);
  if (scores.empty()) scores.assign(closes.size(), 0.0);
  series.scores = std::move(scores);
  return series;
}

}  // namespace sentio::testutil
