#include "sentio/marketdata.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
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

std::vector<std::string> split_fields(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, sep)) out.push_back(trim(token));
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_number(const std::string& token, std::size_t line_no,
                    const char* column) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric " +
                    column + " value '" + token + "'");
  }
  if (consumed != token.size() || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric " +
                    column + " value '" + token + "'");
  }
  return value;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Splits CSV text into non-empty trimmed lines, tolerating \r\n.
std::vector<std::pair<std::size_t, std::string>> csv_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = (nl == std::string_view::npos)
                               ? text.substr(pos)
                               : text.substr(pos, nl - pos);
    ++line_no;
    std::string line = trim(raw);
    if (!line.empty()) lines.emplace_back(line_no, std::move(line));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

}  // namespace

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

const char* label_name(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::ExtremelyNegative: return "ExtremelyNegative";
    case SentimentLabel::Negative: return "Negative";
    case SentimentLabel::Neutral: return "Neutral";
    case SentimentLabel::Positive: return "Positive";
    case SentimentLabel::ExtremelyPositive: return "ExtremelyPositive";
  }
  return "Neutral";
}

SentimentLabel parse_label(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "extremelynegative") return SentimentLabel::ExtremelyNegative;
  if (t == "negative") return SentimentLabel::Negative;
  if (t == "neutral") return SentimentLabel::Neutral;
  if (t == "positive") return SentimentLabel::Positive;
  if (t == "extremelypositive") return SentimentLabel::ExtremelyPositive;
  throw DataError("unknown sentiment label '" + std::string(text) + "'");
}

double label_to_score(SentimentLabel label) {
  // Uniform grid over [-1, 1]: k in {0..4} -> -1 + k/2.
  return -1.0 + 0.5 * static_cast<double>(label);
}

std::vector<OhlcvBar> parse_ohlcv_csv(std::string_view text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw DataError("empty OHLCV input");

  const std::string header = lower(lines.front().second);
  if (header != "date,open,high,low,close,volume") {
    throw DataError("line " + std::to_string(lines.front().first) +
                    ": expected header 'Date,Open,High,Low,Close,Volume'");
  }
  if (lines.size() == 1) throw DataError("empty OHLCV input: no data rows");

  std::vector<OhlcvBar> bars;
  bars.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line_no, line] = lines[i];
    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw DataError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    }
    OhlcvBar bar;
    bar.date = fields[0];
    if (!is_iso_date(bar.date)) {
      throw DataError("line " + std::to_string(line_no) + ": date '" + bar.date +
                      "' is not ISO-8601 (YYYY-MM-DD)");
    }
    bar.open = parse_number(fields[1], line_no, "Open");
    bar.high = parse_number(fields[2], line_no, "High");
    bar.low = parse_number(fields[3], line_no, "Low");
    bar.close = parse_number(fields[4], line_no, "Close");
    bar.volume = parse_number(fields[5], line_no, "Volume");

    if (bar.open <= 0 || bar.high <= 0 || bar.low <= 0 || bar.close <= 0) {
      throw DataError("line " + std::to_string(line_no) + ": prices must be > 0");
    }
    if (bar.volume < 0) {
      throw DataError("line " + std::to_string(line_no) + ": volume must be >= 0");
    }
    if (bar.low > std::min(bar.open, bar.close) ||
        bar.high < std::max(bar.open, bar.close)) {
      throw DataError("line " + std::to_string(line_no) +
                      ": OHLC ordering violated (need low <= open,close <= high)");
    }
    bars.push_back(std::move(bar));
  }

  std::sort(bars.begin(), bars.end(),
            [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < bars.size(); ++i) {
    if (bars[i].date == bars[i - 1].date) {
      throw DataError("duplicate date " + bars[i].date);
    }
  }
  return bars;
}

AssetSeries merge_series(std::string symbol, std::vector<OhlcvBar> bars,
                         const std::map<std::string, SentimentLabel>& sentiment) {
  AssetSeries series;
  series.symbol = std::move(symbol);
  series.scores.reserve(bars.size());
  for (const auto& bar : bars) {
    const auto it = sentiment.find(bar.date);
    series.scores.push_back(it == sentiment.end() ? 0.0 : label_to_score(it->second));
  }
  series.bars = std::move(bars);
  return series;
}

MarketDataset align_dataset(std::vector<AssetSeries> series, std::size_t min_days) {
  if (series.empty()) throw DataError("align_dataset: no series given");

  std::set<std::string> common;
  for (const auto& bar : series.front().bars) common.insert(bar.date);
  for (std::size_t i = 1; i < series.size(); ++i) {
    std::set<std::string> dates;
    for (const auto& bar : series[i].bars) dates.insert(bar.date);
    std::set<std::string> kept;
    std::set_intersection(common.begin(), common.end(), dates.begin(), dates.end(),
                          std::inserter(kept, kept.begin()));
    common = std::move(kept);
  }

  if (common.size() < min_days) {
    std::string symbols;
    for (const auto& s : series) {
      if (!symbols.empty()) symbols += ", ";
      symbols += s.symbol;
    }
    throw DataError("insufficient date overlap across [" + symbols + "]: " +
                    std::to_string(common.size()) + " shared days, need " +
                    std::to_string(min_days));
  }

  MarketDataset dataset;
  dataset.assets.reserve(series.size());
  for (auto& s : series) {
    AssetSeries restricted;
    restricted.symbol = std::move(s.symbol);
    for (std::size_t i = 0; i < s.bars.size(); ++i) {
      if (common.count(s.bars[i].date)) {
        restricted.bars.push_back(std::move(s.bars[i]));
        restricted.scores.push_back(s.scores[i]);
      }
    }
    dataset.assets.push_back(std::move(restricted));
  }
  return dataset;
}

ObservationFrame normalize_window(const AssetSeries& series, int t, int w) {
  if (w < 1) throw DataError("normalize_window: window must be >= 1");
  if (t < w - 1 || t >= static_cast<int>(series.size())) {
    throw DataError("normalize_window: window underflow at t=" + std::to_string(t) +
                    " with w=" + std::to_string(w));
  }

  double max_high = 0.0;
  double max_volume = 0.0;
  for (int i = t - w + 1; i <= t; ++i) {
    max_high = std::max(max_high, series.bars[i].high);
    max_volume = std::max(max_volume, series.bars[i].volume);
  }
  if (max_high <= 0.0) max_high = 1.0;
  if (max_volume <= 0.0) max_volume = 1.0;

  ObservationFrame frame;
  frame.rows = w;
  frame.values.reserve(static_cast<std::size_t>(w) * 5);
  for (int i = t - w + 1; i <= t; ++i) {
    const auto& bar = series.bars[i];
    frame.values.push_back(bar.open / max_high);
    frame.values.push_back(bar.high / max_high);
    frame.values.push_back(bar.low / max_high);
    frame.values.push_back(bar.close / max_high);
    frame.values.push_back(bar.volume / max_volume);
  }
  return frame;
}

double rolling_volatility(const AssetSeries& series, int t, int w) {
  if (t < 0 || t >= static_cast<int>(series.size())) {
    throw DataError("rolling_volatility: index out of range");
  }
  const int closes = std::min(w, t + 1);
  const int n_returns = closes - 1;
  if (n_returns < 2) return 0.0;

  std::vector<double> returns;
  returns.reserve(n_returns);
  for (int i = t - n_returns + 1; i <= t; ++i) {
    returns.push_back(series.bars[i].close / series.bars[i - 1].close - 1.0);
  }
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= returns.size();
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= returns.size();
  return std::sqrt(var);
}

std::map<std::string, std::map<std::string, SentimentLabel>> parse_sentiment_csv(
    std::string_view text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw DataError("empty sentiment input");

  if (lower(lines.front().second) != "date,symbol,label") {
    throw DataError("line " + std::to_string(lines.front().first) +
                    ": expected header 'Date,Symbol,Label'");
  }

  std::map<std::string, std::map<std::string, SentimentLabel>> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line_no, line] = lines[i];
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw DataError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                      std::to_string(fields.size()));
    }
    if (!is_iso_date(fields[0])) {
      throw DataError("line " + std::to_string(line_no) + ": date '" + fields[0] +
                      "' is not ISO-8601 (YYYY-MM-DD)");
    }
    SentimentLabel label;
    try {
      label = parse_label(fields[2]);
    } catch (const DataError&) {
      throw DataError("line " + std::to_string(line_no) + ": unknown label '" +
                      fields[2] + "'");
    }
    out[fields[1]][fields[0]] = label;
  }
  return out;
}

}  // namespace sentio
