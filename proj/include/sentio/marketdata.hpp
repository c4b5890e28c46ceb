#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sentio {

/// One trading day of OHLCV data. Prices are USD, volume a share count.
/// Invariant: low <= min(open, close) <= max(open, close) <= high, volume >= 0.
struct OhlcvBar {
  std::string date;  // ISO-8601 calendar day, e.g. "2024-01-02"
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;
};

/// Five ordered news-sentiment categories, most negative first.
enum class SentimentLabel {
  ExtremelyNegative,
  Negative,
  Neutral,
  Positive,
  ExtremelyPositive,
};

/// Canonical spelling used in CSV files ("ExtremelyNegative", ...).
const char* label_name(SentimentLabel label);

/// Case-insensitive parse of the canonical label names; throws DataError on
/// unknown text.
SentimentLabel parse_label(std::string_view text);

/// Maps the five labels onto a uniform grid over [-1, 1]:
/// EN -> -1.0, Neg -> -0.5, Neu -> 0.0, Pos -> +0.5, EP -> +1.0.
double label_to_score(SentimentLabel label);

/// Price series for one symbol with an index-aligned per-day sentiment score
/// in [-1, 1]. Bars are strictly ascending by date with no duplicates.
struct AssetSeries {
  std::string symbol;
  std::vector<OhlcvBar> bars;
  std::vector<double> scores;

  std::size_t size() const { return bars.size(); }
};

/// Non-empty set of asset series sharing an identical date vector, so a
/// single time index t addresses every asset.
struct MarketDataset {
  std::vector<AssetSeries> assets;

  std::size_t length() const { return assets.empty() ? 0 : assets.front().size(); }
};

/// Parses `Date,Open,High,Low,Close,Volume` CSV content into bars sorted
/// ascending by date. Throws DataError naming the offending line for
/// malformed rows, OHLC-order violations, duplicate dates, or empty input.
std::vector<OhlcvBar> parse_ohlcv_csv(std::string_view text);

/// Attaches sentiment scores to bars: score[i] = label_to_score(sentiment at
/// date_i) when present, else 0.0 (neutral fill).
AssetSeries merge_series(std::string symbol, std::vector<OhlcvBar> bars,
                         const std::map<std::string, SentimentLabel>& sentiment);

/// Restricts every series to the intersection of all date sets, preserving
/// order. Throws DataError listing the symbols when fewer than `min_days`
/// dates survive.
MarketDataset align_dataset(std::vector<AssetSeries> series, std::size_t min_days = 7);

/// w x 5 window of normalized OHLCV rows, oldest first. Columns are
/// O,H,L,C,V; price columns divided by the window-max high, volume by the
/// window-max volume (1.0 substituted for a zero max).
struct ObservationFrame {
  int rows = 0;
  std::vector<double> values;  // row-major, 5 columns

  double at(int row, int col) const { return values[row * 5 + col]; }
};

ObservationFrame normalize_window(const AssetSeries& series, int t, int w = 5);

/// Population standard deviation of simple close-to-close returns over the
/// last min(w, t+1) closes; 0 when fewer than 2 returns exist.
double rolling_volatility(const AssetSeries& series, int t, int w = 5);

/// Parses `Date,Symbol,Label` CSV content into symbol -> date -> label.
/// Unknown labels or malformed rows throw DataError naming the row.
std::map<std::string, std::map<std::string, SentimentLabel>> parse_sentiment_csv(
    std::string_view text);

/// True for strict `YYYY-MM-DD` with a plausible month/day.
bool is_iso_date(std::string_view s);

}  // namespace sentio
