#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sentio/marketdata.hpp"

namespace sentio {

/// Maps one day's concatenated headline text to a sentiment label. Must be
/// a pure function of its inputs. Remote LLM scorers plug in here; the
/// shipped implementation is the keyword lexicon below.
class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  virtual SentimentLabel label(std::string_view date, std::string_view text) const = 0;
};

/// Deterministic keyword scorer. Tokenizes into lowercase alphanumeric
/// runs, counts positive- and negative-lexicon hits (with multiplicity),
/// and thresholds the net score:
///   net >= +3 -> ExtremelyPositive,  +1..+2 -> Positive,
///   net ==  0 -> Neutral (ties included),
///   -2..-1    -> Negative,           net <= -3 -> ExtremelyNegative.
class LexiconProvider final : public SentimentProvider {
 public:
  SentimentLabel label(std::string_view date, std::string_view text) const override;

  /// Net lexicon score (positive hits minus negative hits).
  static int score_text(std::string_view text);
};

struct NewsRow {
  std::string date;
  std::string symbol;
  std::string text;
};

/// Parses `Date,Symbol,Text` CSV content; the text field may be quoted with
/// doubled-quote escapes. Throws DataError naming malformed rows.
std::vector<NewsRow> parse_news_csv(std::string_view text);

/// Labels every news row through the provider and renders the standard
/// `Date,Symbol,Label` sentiment CSV.
std::string label_news(const std::vector<NewsRow>& rows, const SentimentProvider& provider);

}  // namespace sentio
