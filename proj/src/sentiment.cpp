#include "sentio/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "sentio/errors.hpp"

namespace sentio {

namespace {

constexpr std::array kPositiveWords = {
    "gain",       "gains",      "beat",     "beats",      "strong",
    "record",     "surge",      "surges",   "rally",      "rallies",
    "upgrade",    "upgraded",   "profit",   "profits",    "growth",
    "bullish",    "soar",       "soars",    "jump",       "jumps",
    "outperform", "win",        "wins",     "boost",      "boosts",
    "optimistic", "rise",       "rises",    "rose",       "expand",
    "expands",    "dividend",   "breakout", "buyback",    "momentum",
};

constexpr std::array kNegativeWords = {
    "loss",      "losses",     "miss",      "misses",    "weak",
    "plunge",    "plunges",    "fall",      "falls",     "fell",
    "downgrade", "downgraded", "lawsuit",   "recall",    "bearish",
    "drop",      "drops",      "slump",     "slumps",    "crash",
    "cut",       "cuts",       "layoff",    "layoffs",   "warn",
    "warns",     "warning",    "decline",   "declines",  "fraud",
    "probe",     "default",    "shortfall", "bankruptcy", "selloff",
};

bool contains(std::string_view word, const auto& table) {
  return std::find(table.begin(), table.end(), word) != table.end();
}

}  // namespace

int LexiconProvider::score_text(std::string_view text) {
  int score = 0;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (contains(token, kPositiveWords)) ++score;
    else if (contains(token, kNegativeWords)) --score;
    token.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      flush();
    }
  }
  flush();
  return score;
}

SentimentLabel LexiconProvider::label(std::string_view /*date*/,
                                      std::string_view text) const {
  const int score = score_text(text);
  if (score >= 3) return SentimentLabel::ExtremelyPositive;
  if (score >= 1) return SentimentLabel::Positive;
  if (score <= -3) return SentimentLabel::ExtremelyNegative;
  if (score <= -1) return SentimentLabel::Negative;
  return SentimentLabel::Neutral;
}

std::vector<NewsRow> parse_news_csv(std::string_view text) {
  // Quote-aware field splitter; headlines routinely contain commas.
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;

  auto end_field = [&] {
    fields.push_back(field);
    field.clear();
  };
  auto end_record = [&] {
    if (row_has_content || !field.empty() || fields.size() > 0) {
      end_field();
      bool all_empty = std::all_of(fields.begin(), fields.end(),
                                   [](const std::string& f) { return f.empty(); });
      if (!all_empty) records.push_back(fields);
      fields.clear();
    }
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      row_has_content = true;
    } else if (c == '"') {
      in_quotes = true;
      row_has_content = true;
    } else if (c == ',') {
      end_field();
      row_has_content = true;
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
      row_has_content = true;
    }
  }
  if (!field.empty() && field.back() == '\r') field.pop_back();
  if (row_has_content || !fields.empty()) end_record();

  if (records.empty()) throw DataError("empty news input");
  if (records.front().size() < 3 || records.front()[0] != "Date" ||
      records.front()[1] != "Symbol" || records.front()[2] != "Text") {
    throw DataError("line 1: expected header 'Date,Symbol,Text'");
  }

  std::vector<NewsRow> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 3) {
      throw DataError("news row " + std::to_string(r + 1) + ": expected 3 fields, got " +
                      std::to_string(rec.size()));
    }
    if (!is_iso_date(rec[0])) {
      throw DataError("news row " + std::to_string(r + 1) + ": date '" + rec[0] +
                      "' is not ISO-8601 (YYYY-MM-DD)");
    }
    if (rec[1].empty()) {
      throw DataError("news row " + std::to_string(r + 1) + ": empty symbol");
    }
    rows.push_back({rec[0], rec[1], rec[2]});
  }
  return rows;
}

std::string label_news(const std::vector<NewsRow>& rows,
                       const SentimentProvider& provider) {
  std::string out = "Date,Symbol,Label\n";
  for (const auto& row : rows) {
    out += row.date + "," + row.symbol + "," +
           label_name(provider.label(row.date, row.text)) + "\n";
  }
  return out;
}

}  // namespace sentio
