#include <cmath>
#include <random>

#include "doctest.h"
#include "finsent/csv.hpp"
#include "finsent/evaluation.hpp"
#include "test_support.hpp"

using namespace finsent;
using namespace finsent::eval;

namespace {

EvaluatedRun run_named(std::string name, std::optional<double> val, std::string digest = "d1") {
  EvaluatedRun r;
  r.model = std::move(name);
  r.ticker = "MSFT";
  r.test_digest = std::move(digest);
  r.val_mse = val;
  return r;
}

EvaluatedRun run_with_predictions(std::size_t n_test, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EvaluatedRun run = run_named("LSTM", std::nullopt);
  for (std::size_t i = 0; i < n_test + 4; ++i) {
    PredictionRow row;
    row.date = Date(2019, 6, 3) + static_cast<std::int32_t>(i);
    row.split = i < 4 ? features::Split::Val : features::Split::Test;
    row.actual_scaled = u(rng);
    row.predicted_scaled = u(rng);
    row.actual_close = 100.0 + 30.0 * row.actual_scaled;
    row.predicted_close = 100.0 + 30.0 * row.predicted_scaled;
    run.predictions.push_back(row);
  }
  score_predictions(run);
  return run;
}

}  // namespace

TEST_CASE("metrics basics") {
  std::vector<double> a{1, 1}, z{0, 0};
  auto m = metrics(z, a);
  CHECK(m.mse == 1.0);
  CHECK(m.mae == 1.0);
  CHECK(m.rmse == 1.0);
  auto same = metrics(a, a);
  CHECK(same.mse == 0.0);
  CHECK(same.mae == 0.0);
  CHECK(same.rmse == 0.0);
  std::vector<double> three{1, 2, 3}, none, bad{1, NAN};
  CHECK_ERROR(metrics(three, a), LengthMismatch);
  CHECK_ERROR(metrics(none, none), EmptyInput);
  CHECK_ERROR(metrics(bad, a), NonFiniteValue);
}

TEST_CASE("rmse is the square root of mse") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> e(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(1 + rng() % 300), a(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = e(rng);
      a[i] = e(rng);
    }
    auto m = metrics(p, a);
    CHECK(std::abs(m.rmse - std::sqrt(m.mse)) <= 1e-12);
    CHECK(m.mae <= m.rmse + 1e-15);
  }
}

TEST_CASE("published ARIMA error triple is self-consistent") {
  // Published to 5 decimals, so the true MSE lies within half a unit of the
  // last printed digit.
  const double mse = 0.00975, mae = 0.07154, rmse = 0.09876;
  const double derived = std::sqrt(mse);
  CHECK(derived == doctest::Approx(0.0987420882906575).epsilon(1e-15));
  CHECK(std::floor(derived * 1e4) == std::floor(rmse * 1e4));
  const double half_unit = 0.5e-5;
  CHECK(std::sqrt(mse - half_unit) <= rmse);
  CHECK(rmse <= std::sqrt(mse + half_unit));
  CHECK(mae <= rmse);
}

TEST_CASE("compare orders by validation mse") {
  auto report = compare({run_named("ARIMA", 0.01), run_named("LSTM", 0.0001)}, {});
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].model == "LSTM");
  auto single = compare({run_named("ARIMA", 0.01)}, {});
  CHECK(single.rows.size() == 1);
  auto ties = compare({run_named("b", 0.5), run_named("c", std::nullopt), run_named("a", 0.5)}, {});
  CHECK(ties.rows[0].model == "a");
  CHECK(ties.rows[1].model == "b");
  CHECK(ties.rows[2].model == "c");
  CHECK_ERROR(compare({run_named("ARIMA", 0.01, "d1"), run_named("LSTM", 0.02, "d2")}, {}), MismatchedTestSets);
  CHECK_ERROR(compare({}, {}), EmptyInput);
}

TEST_CASE("test digest depends on dates, targets and ticker") {
  std::vector<features::Window> ws(3);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    ws[i].target_date = Date(2019, 1, 1) + static_cast<std::int32_t>(i);
    ws[i].target = 0.1 * static_cast<double>(i);
  }
  std::vector<const features::Window*> ptrs{&ws[0], &ws[1], &ws[2]};
  const auto base = test_set_digest("MSFT", ptrs);
  CHECK(base.size() == 16);
  CHECK(test_set_digest("MSFT", ptrs) == base);
  CHECK(test_set_digest("AAPL", ptrs) != base);
  ws[2].target = 0.2000000001;
  CHECK(test_set_digest("MSFT", ptrs) != base);
}

TEST_CASE("predictions csv holds test rows and round-trips") {
  auto run = run_with_predictions(10, 4);
  const auto text = predictions_csv(run);
  auto t = csv::parse(text);
  CHECK(t.header == std::vector<std::string>{"date", "actual_close", "predicted_close"});
  REQUIRE(t.rows.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& r = run.predictions[i + 4];
    CHECK(t.rows[i][0] == r.date.iso());
    CHECK(std::abs(std::stod(t.rows[i][1]) - r.actual_close) <= 1e-9 * std::abs(r.actual_close));
    CHECK(std::abs(std::stod(t.rows[i][2]) - r.predicted_close) <= 1e-9 * std::abs(r.predicted_close));
  }
}

TEST_CASE("score_predictions separates splits") {
  auto run = run_with_predictions(6, 9);
  std::vector<double> tp, ta;
  for (const auto& r : run.predictions) {
    if (r.split == features::Split::Test) {
      tp.push_back(r.predicted_scaled);
      ta.push_back(r.actual_scaled);
    }
  }
  CHECK(run.test.mse == metrics(tp, ta).mse);
  REQUIRE(run.val_mse.has_value());
  CHECK(run.test_price.rmse == doctest::Approx(30.0 * run.test.rmse).epsilon(1e-12));
}

TEST_CASE("evaluated run json round-trips") {
  auto run = run_with_predictions(5, 2);
  run.train_mse = 0.125;
  auto back = EvaluatedRun::from_json(run.to_json());
  CHECK(back.model == run.model);
  CHECK(back.train_mse == run.train_mse);
  CHECK(back.val_mse == run.val_mse);
  CHECK(back.test.mse == run.test.mse);
  REQUIRE(back.predictions.size() == run.predictions.size());
  CHECK(back.predictions[3].predicted_close == run.predictions[3].predicted_close);
  CHECK(back.predictions[7].split == features::Split::Test);
  CHECK(back.to_json() == run.to_json());
  CHECK_ERROR(EvaluatedRun::from_json("[]"), BadFormat);
}

TEST_CASE("report renderings") {
  auto a = run_with_predictions(5, 1);
  a.model = "ARIMA";
  a.val_mse = 0.2;
  auto b = run_with_predictions(5, 2);
  b.model = "Sentiment+LSTM";
  b.val_mse = 0.1;
  b.test_digest = a.test_digest;
  auto report = compare({a, b}, {"MSFT", "2019-01-02", "2019-10-16", "abc"});
  const auto text = report.to_text();
  CHECK(text.find("Sentiment+LSTM") < text.find("ARIMA"));
  CHECK(text.find("N/A") != std::string::npos);
  CHECK(report.to_json().find("generated_at") == std::string::npos);
  CHECK(report.to_json("2026-01-01T00:00:00Z").find("generated_at") != std::string::npos);
}

TEST_CASE("rolling stats csv aligns dates with window ends") {
  std::vector<Date> d{Date(2019, 1, 1), Date(2019, 1, 2), Date(2019, 1, 3), Date(2019, 1, 4)};
  std::vector<double> c{1, 2, 3, 4};
  CHECK(rolling_stats_csv(d, c, 3) ==
        "date,rolling_mean,rolling_std\n2019-01-03,2,0.816496580928\n2019-01-04,3,0.816496580928\n");
}
