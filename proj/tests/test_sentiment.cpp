#include <algorithm>
#include <random>

#include "doctest.h"
#include "finsent/hash.hpp"
#include "finsent/io.hpp"
#include "finsent/sentiment.hpp"
#include "test_support.hpp"

using namespace finsent;
using namespace finsent::sentiment;

namespace {

int brute_nsi(double r, double s) {
  if (r > s) return 1;
  if (-s < r && r < s) return 0;
  if (r == s || r == -s) return 0;
  return -1;
}

market::JoinedSeries series_of(const std::vector<std::pair<double, double>>& open_close,
                               const std::vector<std::vector<std::string>>& titles = {}) {
  market::JoinedSeries js;
  js.ticker = "MSFT";
  Date d(2019, 1, 2);
  for (std::size_t i = 0; i < open_close.size(); ++i) {
    market::JoinedRow row;
    row.bar = {d + static_cast<std::int32_t>(i), "MSFT", open_close[i].first,
               std::max(open_close[i].first, open_close[i].second) + 1,
               std::min(open_close[i].first, open_close[i].second) - 1, open_close[i].second, 1000};
    if (i < titles.size()) {
      for (const auto& t : titles[i]) row.news.push_back({row.bar.date, "MSFT", t});
    }
    js.rows.push_back(row);
  }
  return js;
}

}  // namespace

TEST_CASE("scalar score is positive minus negative") {
  CHECK(scalar_score({1.0, 0.0, 0.0}) == 1.0);
  CHECK(scalar_score({0.2, 0.2, 0.6}) == 0.0);
  CHECK(scalar_score({0.7, 0.1, 0.2}) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("triple validity") {
  CHECK(SentimentTriple{0.3, 0.3, 0.4}.valid());
  CHECK(SentimentTriple{0.3, 0.3, 0.4005}.valid());
  CHECK_FALSE(SentimentTriple{0.3, 0.3, 0.5}.valid());
  CHECK_FALSE(SentimentTriple{-0.1, 0.6, 0.5}.valid());
}

TEST_CASE("returns") {
  CHECK(compute_return(100.0, 101.0) == doctest::Approx(0.01));
  CHECK(compute_return(100.0, 100.0) == 0.0);
  CHECK(compute_return(50.0, 55.0) == doctest::Approx(0.10));
  CHECK_ERROR(compute_return(0.0, 1.0), NonPositiveOpen);
  CHECK_ERROR(compute_return(-1.0, 1.0), NonPositiveOpen);
}

TEST_CASE("nsi labels") {
  CHECK(nsi_label(0.02, 0.01) == 1);
  CHECK(nsi_label(0.0, 0.01) == 0);
  CHECK(nsi_label(-0.015, 0.01) == -1);
  CHECK(nsi_label(0.01, 0.01) == 0);
  CHECK(nsi_label(-0.01, 0.01) == 0);
  CHECK_ERROR(nsi_label(0.0, 0.0), NonPositiveThreshold);
  CHECK_ERROR(nsi_label(0.0, -0.01), NonPositiveThreshold);
}

TEST_CASE("nsi agrees with brute force and is odd") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> r(-0.1, 0.1);
  std::uniform_real_distribution<double> s(1e-4, 0.05);
  std::size_t mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const double ri = r(rng), si = s(rng);
    if (nsi_label(ri, si) != brute_nsi(ri, si)) ++mismatches;
    if (nsi_label(-ri, si) != -nsi_label(ri, si)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("aggregate_day") {
  std::vector<double> v{0.8, -0.2, 0.0};
  CHECK(aggregate_day(v) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(aggregate_day({}) == 0.0);
  std::vector<double> one{0.5};
  CHECK(aggregate_day(one) == 0.5);
}

TEST_CASE("aggregate_day is permutation invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 12);
    for (auto& x : v) x = u(rng);
    const double base = aggregate_day(v);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(aggregate_day(v) == doctest::Approx(base).epsilon(1e-14));
    CHECK(base >= -1.0);
    CHECK(base <= 1.0);
  }
}

TEST_CASE("daily records without news are neutral") {
  auto js = series_of({{100, 101}, {101, 99}, {99, 99.5}});
  auto build = build_daily_records(js, {}, {});
  REQUIRE(build.records.size() == 3);
  for (const auto& r : build.records) {
    CHECK(r.sentiment_score == 0.0);
    CHECK(r.headline_count == 0);
  }
  CHECK(build.missing_scores == 0);
}

TEST_CASE("daily records aggregate scores and label nsi") {
  auto js = series_of({{100, 103}, {100, 99.5}}, {{"good", "bad"}, {"good"}});
  ScoreMap scores{{title_hash("good"), {0.9, 0.1, 0.0}}, {title_hash("bad"), {0.1, 0.9, 0.0}}};
  auto build = build_daily_records(js, scores, {});
  CHECK(build.records[0].sentiment_score == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(build.records[0].headline_count == 2);
  CHECK(build.records[0].nsi == nsi_label(compute_return(100, 103), 0.01));
  CHECK(build.records[0].nsi == 1);
  CHECK(build.records[1].sentiment_score == doctest::Approx(0.8));
  CHECK(build.records[1].nsi == 0);
}

TEST_CASE("multi-day horizon and end-of-series fallback") {
  auto js = series_of({{50, 51}, {51, 52}, {52, 55}});
  SentimentConfig cfg;
  cfg.horizon_k = 3;
  auto build = build_daily_records(js, {}, cfg);
  CHECK(build.records[0].return_frac == doctest::Approx(0.10));
  CHECK_FALSE(build.records[0].return_fallback);
  CHECK(build.records[1].return_fallback);
  CHECK(build.records[1].return_frac == doctest::Approx(1.0 / 51.0));
  CHECK(build.fallback_rows == 2);
}

TEST_CASE("missing scores are neutral unless strict") {
  auto js = series_of({{100, 101}}, {{"unscored", "scored"}});
  ScoreMap scores{{title_hash("scored"), {1.0, 0.0, 0.0}}};
  auto build = build_daily_records(js, scores, {});
  CHECK(build.missing_scores == 1);
  CHECK(build.records[0].sentiment_score == doctest::Approx(0.5));
  SentimentConfig strict;
  strict.strict = true;
  CHECK_ERROR(build_daily_records(js, scores, strict), MissingScore);
  SentimentConfig bad;
  bad.threshold_s = 0.0;
  CHECK_ERROR(build_daily_records(js, scores, bad), NonPositiveThreshold);
}

TEST_CASE("fixture csv round-trips and validates") {
  testing::TempDir dir("fixture");
  std::vector<FixtureRow> rows{{Date(2019, 1, 2), "MSFT", title_hash("x"), {0.7, 0.1, 0.2}},
                               {Date(2019, 1, 3), "MSFT", title_hash("y"), {0.05, 0.9, 0.05}}};
  io::write_file_atomic(dir / "s.csv", fixture_csv(rows));
  auto back = load_fixture(dir / "s.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].title_hash == title_hash("y"));
  CHECK(back[1].triple.negative == 0.9);
  CHECK(to_score_map(back).count(title_hash("x")) == 1);

  io::write_file_atomic(dir / "bad.csv",
                        "date,ticker,title_hash,positive,negative,neutral\n"
                        "2019-01-02,MSFT,0000000000000001,0.9,0.9,0.1\n");
  CHECK_ERROR(load_fixture(dir / "bad.csv"), InvalidTriple);
}

TEST_CASE("bundled sentiment fixture is valid") {
  auto rows = load_fixture(testing::fixture_dir() / "sentiment.csv");
  CHECK(rows.size() > 300);
  for (const auto& r : rows) CHECK(r.triple.valid());
}

TEST_CASE("daily records csv round-trips") {
  testing::TempDir dir("daily");
  auto recs = testing::synthetic_records(20);
  recs[3].return_fallback = true;
  io::write_file_atomic(dir / "d.csv", daily_records_csv(recs));
  auto back = load_daily_records(dir / "d.csv");
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].date == recs[i].date);
    CHECK(back[i].close == recs[i].close);
    CHECK(back[i].sentiment_score == recs[i].sentiment_score);
    CHECK(back[i].nsi == recs[i].nsi);
    CHECK(back[i].return_fallback == recs[i].return_fallback);
  }
}
