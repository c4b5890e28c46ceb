#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sentio/errors.hpp"
#include "sentio/marketdata.hpp"
#include "sentio/rng.hpp"
#include "test_util.hpp"

using namespace sentio;
using testutil::date_for;

TEST_CASE("parse_ohlcv_csv maps a valid row") {
  const auto bars =
      parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n2024-01-02,100,110,95,105,5000\n");
  REQUIRE(bars.size() == 1);
  CHECK(bars[0].date == "2024-01-02");
  CHECK(bars[0].open == 100.0);
  CHECK(bars[0].high == 110.0);
  CHECK(bars[0].low == 95.0);
  CHECK(bars[0].close == 105.0);
  CHECK(bars[0].volume == 5000.0);
}

TEST_CASE("parse_ohlcv_csv sorts rows ascending by date") {
  const auto bars = parse_ohlcv_csv(
      "Date,Open,High,Low,Close,Volume\n"
      "2024-01-04,100,110,95,105,5000\n"
      "2024-01-02,100,110,95,105,5000\n"
      "2024-01-03,100,110,95,105,5000\n");
  REQUIRE(bars.size() == 3);
  CHECK(bars[0].date == "2024-01-02");
  CHECK(bars[1].date == "2024-01-03");
  CHECK(bars[2].date == "2024-01-04");
}

TEST_CASE("parse_ohlcv_csv rejects bad rows with line numbers") {
  CHECK_THROWS_WITH_AS(
      parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n2024-01-02,100,90,95,105,5000\n"),
      doctest::Contains("line 2"), DataError);
  CHECK_THROWS_WITH_AS(
      parse_ohlcv_csv(
          "Date,Open,High,Low,Close,Volume\n"
          "2024-01-02,100,110,95,105,5000\n"
          "2024-01-03,abc,110,95,105,5000\n"),
      doctest::Contains("line 3"), DataError);
  CHECK_THROWS_AS(parse_ohlcv_csv(""), DataError);
  CHECK_THROWS_AS(parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n"), DataError);
  CHECK_THROWS_AS(parse_ohlcv_csv("Open,Date,High,Low,Close,Volume\n1,2,3,4,5,6\n"),
                  DataError);
  // ambiguous date format
  CHECK_THROWS_AS(
      parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n01/02/2024,100,110,95,105,5000\n"),
      DataError);
  // duplicate dates
  CHECK_THROWS_AS(parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n"
                                  "2024-01-02,100,110,95,105,5000\n"
                                  "2024-01-02,101,111,96,106,5000\n"),
                  DataError);
}

TEST_CASE("label_to_score fixed points") {
  CHECK(label_to_score(SentimentLabel::Neutral) == 0.0);
  CHECK(label_to_score(SentimentLabel::ExtremelyPositive) == 1.0);
  // Oracle: uniform grid, k in {0..4} -> -1 + k/2.
  const SentimentLabel order[] = {
      SentimentLabel::ExtremelyNegative, SentimentLabel::Negative,
      SentimentLabel::Neutral, SentimentLabel::Positive,
      SentimentLabel::ExtremelyPositive};
  for (int k = 0; k < 5; ++k) {
    CHECK(label_to_score(order[k]) == -1.0 + k / 2.0);
  }
  CHECK(label_to_score(SentimentLabel::Positive) == 0.5);
}

TEST_CASE("label_to_score is strictly increasing and symmetric") {
  CHECK(label_to_score(SentimentLabel::ExtremelyNegative) ==
        -label_to_score(SentimentLabel::ExtremelyPositive));
  CHECK(label_to_score(SentimentLabel::Negative) ==
        -label_to_score(SentimentLabel::Positive));
  double prev = -2.0;
  for (auto label : {SentimentLabel::ExtremelyNegative, SentimentLabel::Negative,
                     SentimentLabel::Neutral, SentimentLabel::Positive,
                     SentimentLabel::ExtremelyPositive}) {
    CHECK(label_to_score(label) > prev);
    prev = label_to_score(label);
  }
}

TEST_CASE("parse_label is case-insensitive over canonical names") {
  CHECK(parse_label("extremelypositive") == SentimentLabel::ExtremelyPositive);
  CHECK(parse_label("NEUTRAL") == SentimentLabel::Neutral);
  CHECK(parse_label(" Negative ") == SentimentLabel::Negative);
  CHECK_THROWS_AS(parse_label("very positive"), DataError);
  for (auto label : {SentimentLabel::ExtremelyNegative, SentimentLabel::Negative,
                     SentimentLabel::Neutral, SentimentLabel::Positive,
                     SentimentLabel::ExtremelyPositive}) {
    CHECK(parse_label(label_name(label)) == label);
  }
}

TEST_CASE("merge_series fills missing sentiment with neutral") {
  auto bars = testutil::bars_from_closes({100, 101, 102});
  std::map<std::string, SentimentLabel> sentiment{
      {bars[1].date, SentimentLabel::Positive}};
  const auto series = merge_series("SYM", bars, sentiment);
  REQUIRE(series.scores.size() == 3);
  CHECK(series.scores[0] == 0.0);
  CHECK(series.scores[1] == 0.5);
  CHECK(series.scores[2] == 0.0);
}

TEST_CASE("merge_series edge maps") {
  auto bars = testutil::bars_from_closes({100, 101, 102, 103});
  CHECK(merge_series("SYM", bars, {}).scores == std::vector<double>(4, 0.0));

  std::map<std::string, SentimentLabel> all_en;
  for (const auto& bar : bars) all_en[bar.date] = SentimentLabel::ExtremelyNegative;
  CHECK(merge_series("SYM", bars, all_en).scores == std::vector<double>(4, -1.0));
}

TEST_CASE("merge_series output length and score range under random sentiment") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 40));
    std::vector<double> closes(n, 100.0);
    auto bars = testutil::bars_from_closes(closes);
    std::map<std::string, SentimentLabel> sentiment;
    for (const auto& bar : bars) {
      if (rng.uniform() < 0.5) {
        sentiment[bar.date] = static_cast<SentimentLabel>(rng.uniform_int(0, 4));
      }
    }
    const auto series = merge_series("SYM", bars, sentiment);
    CHECK(series.scores.size() == bars.size());
    for (double s : series.scores) {
      CHECK(s >= -1.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("align_dataset keeps identical date vectors unchanged") {
  auto a = testutil::series_from_closes("A", {1, 2, 3});
  auto b = testutil::series_from_closes("B", {4, 5, 6});
  const auto dataset = align_dataset({a, b}, 3);
  REQUIRE(dataset.assets.size() == 2);
  CHECK(dataset.assets[0].size() == 3);
  CHECK(dataset.assets[1].size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(dataset.assets[0].bars[i].date == a.bars[i].date);
  }
}

TEST_CASE("align_dataset restricts to the date intersection") {
  AssetSeries a = testutil::series_from_closes("A", {1, 2, 3});  // d0,d1,d2
  AssetSeries b;
  b.symbol = "B";
  b.bars = testutil::bars_from_closes({4, 5, 6});
  for (int i = 0; i < 3; ++i) b.bars[i].date = date_for(i + 1);  // d1,d2,d3
  b.scores.assign(3, 0.0);

  const auto dataset = align_dataset({a, b}, 2);
  REQUIRE(dataset.assets[0].size() == 2);
  CHECK(dataset.assets[0].bars[0].date == date_for(1));
  CHECK(dataset.assets[0].bars[1].date == date_for(2));
  CHECK(dataset.assets[0].bars[0].close == 2.0);
  CHECK(dataset.assets[1].bars[0].close == 4.0);
}

TEST_CASE("align_dataset rejects disjoint series, naming symbols") {
  AssetSeries a = testutil::series_from_closes("AAA", {1, 2});
  AssetSeries b;
  b.symbol = "BBB";
  b.bars = testutil::bars_from_closes({3, 4});
  b.bars[0].date = date_for(10);
  b.bars[1].date = date_for(11);
  b.scores.assign(2, 0.0);
  CHECK_THROWS_WITH_AS(align_dataset({a, b}, 1), doctest::Contains("BBB"), DataError);
}

TEST_CASE("align_dataset output equals the exact set intersection") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<AssetSeries> series;
    std::vector<std::set<std::string>> date_sets;
    const int assets = static_cast<int>(rng.uniform_int(1, 4));
    for (int s = 0; s < assets; ++s) {
      std::vector<int> picks;
      for (int i = 0; i < 30; ++i) {
        if (rng.uniform() < 0.7) picks.push_back(i);
      }
      if (picks.empty()) picks.push_back(0);
      AssetSeries one;
      one.symbol = "S" + std::to_string(s);
      for (int i : picks) {
        OhlcvBar bar;
        bar.date = date_for(i);
        bar.open = bar.high = bar.low = bar.close = 10.0 + i;
        bar.volume = 1;
        one.bars.push_back(bar);
        one.scores.push_back(0.0);
      }
      date_sets.emplace_back();
      for (const auto& bar : one.bars) date_sets.back().insert(bar.date);
      series.push_back(std::move(one));
    }

    std::set<std::string> expected = date_sets[0];
    for (std::size_t s = 1; s < date_sets.size(); ++s) {
      std::set<std::string> kept;
      std::set_intersection(expected.begin(), expected.end(), date_sets[s].begin(),
                            date_sets[s].end(), std::inserter(kept, kept.begin()));
      expected = std::move(kept);
    }

    if (expected.empty()) {
      CHECK_THROWS_AS(align_dataset(series, 1), DataError);
      continue;
    }
    const auto dataset = align_dataset(series, 1);
    for (const auto& asset : dataset.assets) {
      REQUIRE(asset.size() == expected.size());
      auto it = expected.begin();
      for (std::size_t i = 0; i < asset.size(); ++i, ++it) {
        CHECK(asset.bars[i].date == *it);  // ascending, identical across assets
      }
    }
  }
}

TEST_CASE("normalize_window on constant bars is all ones") {
  auto series = testutil::series_from_closes("S", std::vector<double>(8, 100.0));
  for (auto& bar : series.bars) bar.volume = 5000.0;
  const auto frame = normalize_window(series, 6, 5);
  REQUIRE(frame.rows == 5);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) CHECK(frame.at(r, c) == 1.0);
  }
}

TEST_CASE("normalize_window divides prices by the window-max high") {
  auto series = testutil::series_from_closes("S", {100.0, 110.0});
  const auto frame = normalize_window(series, 1, 2);
  CHECK(frame.at(0, 3) == doctest::Approx(100.0 / 110.0).epsilon(1e-12));
  CHECK(frame.at(1, 3) == 1.0);
}

TEST_CASE("normalize_window underflow") {
  auto series = testutil::series_from_closes("S", {100, 101, 102, 103, 104, 105});
  CHECK_THROWS_AS(normalize_window(series, 3, 5), DataError);  // t = w-2
  CHECK_NOTHROW(normalize_window(series, 4, 5));
}

TEST_CASE("normalize_window entries lie in (0,1] with a 1.0 at the max high") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(5, 30));
    AssetSeries series;
    series.symbol = "S";
    for (int i = 0; i < n; ++i) {
      OhlcvBar bar;
      bar.date = date_for(i);
      const double lo = rng.uniform(1.0, 100.0);
      const double hi = lo * rng.uniform(1.0, 1.2);
      bar.low = lo;
      bar.high = hi;
      bar.open = lo + (hi - lo) * rng.uniform();
      bar.close = lo + (hi - lo) * rng.uniform();
      bar.volume = rng.uniform(1.0, 1e6);
      series.bars.push_back(bar);
      series.scores.push_back(0.0);
    }
    const int w = static_cast<int>(rng.uniform_int(2, 5));
    const int t = static_cast<int>(rng.uniform_int(w - 1, n - 1));
    const auto frame = normalize_window(series, t, w);

    double max_high = 0.0;
    for (int i = t - w + 1; i <= t; ++i) max_high = std::max(max_high, series.bars[i].high);
    bool found_unit_high = false;
    for (int r = 0; r < frame.rows; ++r) {
      for (int c = 0; c < 5; ++c) {
        CHECK(frame.at(r, c) > 0.0);
        CHECK(frame.at(r, c) <= 1.0);
      }
      if (series.bars[t - w + 1 + r].high == max_high) {
        CHECK(frame.at(r, 1) == 1.0);
        found_unit_high = true;
      }
    }
    CHECK(found_unit_high);
  }
}

TEST_CASE("rolling_volatility basics") {
  CHECK(rolling_volatility(testutil::series_from_closes("S", {100, 100, 100, 100}), 3,
                           5) == 0.0);
  CHECK(rolling_volatility(testutil::series_from_closes("S", {100, 110}), 1, 5) == 0.0);

  // Brute-force oracle over the returns of [100, 110, 100].
  const auto series = testutil::series_from_closes("S", {100.0, 110.0, 100.0});
  const double r1 = 110.0 / 100.0 - 1.0;
  const double r2 = 100.0 / 110.0 - 1.0;
  const double mean = (r1 + r2) / 2.0;
  const double expected =
      std::sqrt(((r1 - mean) * (r1 - mean) + (r2 - mean) * (r2 - mean)) / 2.0);
  CHECK(rolling_volatility(series, 2, 5) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.09545).epsilon(1e-3));
}

TEST_CASE("rolling_volatility is non-negative and scale-free") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(3, 40));
    std::vector<double> closes;
    double c = rng.uniform(10.0, 200.0);
    for (int i = 0; i < n; ++i) {
      c *= 1.0 + rng.uniform(-0.05, 0.05);
      closes.push_back(c);
    }
    const int t = static_cast<int>(rng.uniform_int(0, n - 1));
    const int w = static_cast<int>(rng.uniform_int(2, 8));
    const double vol = rolling_volatility(testutil::series_from_closes("S", closes), t, w);
    CHECK(vol >= 0.0);

    const double scale = rng.uniform(0.5, 10.0);
    std::vector<double> scaled;
    for (double x : closes) scaled.push_back(x * scale);
    const double vol2 =
        rolling_volatility(testutil::series_from_closes("S", scaled), t, w);
    CHECK(vol2 == doctest::Approx(vol).epsilon(1e-9));
  }
}

TEST_CASE("parse_sentiment_csv reads symbol/date labels") {
  const auto map = parse_sentiment_csv(
      "Date,Symbol,Label\n"
      "2024-01-02,AAA,Positive\n"
      "2024-01-03,AAA,extremelynegative\n"
      "2024-01-02,BBB,Neutral\n");
  CHECK(map.at("AAA").at("2024-01-02") == SentimentLabel::Positive);
  CHECK(map.at("AAA").at("2024-01-03") == SentimentLabel::ExtremelyNegative);
  CHECK(map.at("BBB").at("2024-01-02") == SentimentLabel::Neutral);

  CHECK_THROWS_WITH_AS(
      parse_sentiment_csv("Date,Symbol,Label\n2024-01-02,AAA,Great\n"),
      doctest::Contains("line 2"), DataError);
  CHECK_THROWS_AS(parse_sentiment_csv("Symbol,Date,Label\n"), DataError);
}
