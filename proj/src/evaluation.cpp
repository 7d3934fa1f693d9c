#include "finsent/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "finsent/arima.hpp"
#include "finsent/csv.hpp"
#include "finsent/error.hpp"
#include "finsent/hash.hpp"

namespace finsent::eval {

Metrics metrics(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) throw Error(ErrorCode::LengthMismatch, "pred vs actual length");
  if (pred.empty()) throw Error(ErrorCode::EmptyInput, "metrics on empty input");
  double sq = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(actual[i])) {
      throw Error(ErrorCode::NonFiniteValue, "non-finite value at index " + std::to_string(i));
    }
    const double e = pred[i] - actual[i];
    sq += e * e;
    ab += std::abs(e);
  }
  const double n = static_cast<double>(pred.size());
  Metrics m;
  m.mse = sq / n;
  m.mae = ab / n;
  m.rmse = std::sqrt(m.mse);
  return m;
}

std::string test_set_digest(std::string_view ticker, std::span<const features::Window* const> test_windows) {
  std::uint64_t h = fnv1a64(ticker);
  for (const auto* w : test_windows) {
    h = fnv1a64_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(w->target_date.days())), h);
    const double t = w->target;
    h = fnv1a64_doubles(std::span<const double>(&t, 1), h);
  }
  return to_hex16(h);
}

void score_predictions(EvaluatedRun& run) {
  std::vector<double> vp, va, tp, ta, tpp, tap;
  for (const auto& r : run.predictions) {
    if (r.split == features::Split::Val) {
      vp.push_back(r.predicted_scaled);
      va.push_back(r.actual_scaled);
    } else if (r.split == features::Split::Test) {
      tp.push_back(r.predicted_scaled);
      ta.push_back(r.actual_scaled);
      tpp.push_back(r.predicted_close);
      tap.push_back(r.actual_close);
    }
  }
  run.val_mse = vp.empty() ? std::nullopt : std::optional<double>(metrics(vp, va).mse);
  run.test = metrics(tp, ta);
  run.test_price = metrics(tpp, tap);
}

namespace {

nlohmann::ordered_json metrics_json(const Metrics& m) {
  return {{"mse", m.mse}, {"mae", m.mae}, {"rmse", m.rmse}};
}

Metrics metrics_from(const nlohmann::json& j) {
  return {j.at("mse").get<double>(), j.at("mae").get<double>(), j.at("rmse").get<double>()};
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string fmt(double v, const char* f = "%.6e") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

std::string EvaluatedRun::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["ticker"] = ticker;
  j["test_digest"] = test_digest;
  j["train_mse"] = optional_json(train_mse);
  j["val_mse"] = optional_json(val_mse);
  j["test"] = metrics_json(test);
  j["test_price"] = metrics_json(test_price);
  auto& preds = j["predictions"] = nlohmann::ordered_json::array();
  for (const auto& r : predictions) {
    preds.push_back({{"date", r.date.iso()},
                     {"split", std::string(features::to_string(r.split))},
                     {"actual_scaled", r.actual_scaled},
                     {"predicted_scaled", r.predicted_scaled},
                     {"actual_close", r.actual_close},
                     {"predicted_close", r.predicted_close}});
  }
  return j.dump(2) + "\n";
}

EvaluatedRun EvaluatedRun::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    EvaluatedRun run;
    run.model = j.at("model").get<std::string>();
    run.ticker = j.at("ticker").get<std::string>();
    run.test_digest = j.at("test_digest").get<std::string>();
    if (!j.at("train_mse").is_null()) run.train_mse = j["train_mse"].get<double>();
    if (!j.at("val_mse").is_null()) run.val_mse = j["val_mse"].get<double>();
    run.test = metrics_from(j.at("test"));
    run.test_price = metrics_from(j.at("test_price"));
    for (const auto& p : j.at("predictions")) {
      auto date = parse_date(p.at("date").get<std::string>());
      if (!date) throw Error(ErrorCode::BadFormat, "bad prediction date");
      const auto split = p.at("split").get<std::string>();
      PredictionRow r{*date,
                      split == "val"    ? features::Split::Val
                      : split == "test" ? features::Split::Test
                                        : features::Split::Train,
                      p.at("actual_scaled").get<double>(),
                      p.at("predicted_scaled").get<double>(),
                      p.at("actual_close").get<double>(),
                      p.at("predicted_close").get<double>()};
      run.predictions.push_back(r);
    }
    return run;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadFormat, std::string("evaluation json: ") + e.what());
  }
}

EvalReport compare(std::vector<EvaluatedRun> runs, ReportMetadata metadata) {
  if (runs.empty()) throw Error(ErrorCode::EmptyInput, "no runs to compare");
  for (const auto& r : runs) {
    if (r.test_digest != runs.front().test_digest) {
      throw Error(ErrorCode::MismatchedTestSets,
                  r.model + " was scored on test set " + r.test_digest + ", " + runs.front().model +
                      " on " + runs.front().test_digest);
    }
  }
  std::sort(runs.begin(), runs.end(), [](const EvaluatedRun& a, const EvaluatedRun& b) {
    if (a.val_mse.has_value() != b.val_mse.has_value()) return a.val_mse.has_value();
    if (a.val_mse && *a.val_mse != *b.val_mse) return *a.val_mse < *b.val_mse;
    return a.model < b.model;
  });
  return {std::move(metadata), std::move(runs)};
}

std::string EvalReport::to_text() const {
  std::size_t name_w = 5;
  for (const auto& r : rows) name_w = std::max(name_w, r.model.size());
  std::ostringstream out;
  out << "ticker " << metadata.ticker << "  " << metadata.first_date << " .. " << metadata.last_date << "\n";
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s  %12s  %12s  %12s  %12s  %12s  %12s\n", static_cast<int>(name_w),
                "model", "train_mse", "val_mse", "test_mse", "test_mae", "test_rmse", "price_rmse");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-*s  %12s  %12s  %12s  %12s  %12s  %12s\n", static_cast<int>(name_w),
                  r.model.c_str(), r.train_mse ? fmt(*r.train_mse).c_str() : "N/A",
                  r.val_mse ? fmt(*r.val_mse).c_str() : "N/A", fmt(r.test.mse).c_str(), fmt(r.test.mae).c_str(),
                  fmt(r.test.rmse).c_str(), fmt(r.test_price.rmse, "%.4f").c_str());
    out << line;
  }
  return out.str();
}

std::string EvalReport::to_json(const std::string& generated_at) const {
  nlohmann::ordered_json j;
  j["ticker"] = metadata.ticker;
  j["date_range"] = {metadata.first_date, metadata.last_date};
  j["config_digest"] = metadata.config_digest;
  if (!generated_at.empty()) j["generated_at"] = generated_at;
  j["test_digest"] = rows.empty() ? std::string() : rows.front().test_digest;
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"model", r.model},
                   {"train_mse", optional_json(r.train_mse)},
                   {"val_mse", optional_json(r.val_mse)},
                   {"test_mse", r.test.mse},
                   {"mae", r.test.mae},
                   {"rmse", r.test.rmse},
                   {"price_units", metrics_json(r.test_price)}});
  }
  return j.dump(2) + "\n";
}

std::string predictions_csv(const EvaluatedRun& run) {
  std::vector<const PredictionRow*> rows;
  for (const auto& r : run.predictions) {
    if (r.split == features::Split::Test) rows.push_back(&r);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PredictionRow* a, const PredictionRow* b) { return a->date < b->date; });
  std::ostringstream out;
  out << "date,actual_close,predicted_close\n";
  for (const auto* r : rows) {
    out << r->date.iso() << ',' << csv::format_double(r->actual_close, 12) << ','
        << csv::format_double(r->predicted_close, 12) << '\n';
  }
  return out.str();
}

std::string rolling_stats_csv(std::span<const Date> dates, std::span<const double> closes, std::size_t window) {
  if (dates.size() != closes.size()) throw Error(ErrorCode::LengthMismatch, "dates vs closes");
  const auto stats = arima::rolling_stats(closes, window);
  std::ostringstream out;
  out << "date,rolling_mean,rolling_std\n";
  for (std::size_t i = 0; i < stats.mean.size(); ++i) {
    out << dates[i + window - 1].iso() << ',' << csv::format_double(stats.mean[i], 12) << ','
        << csv::format_double(stats.stddev[i], 12) << '\n';
  }
  return out.str();
}

}  // namespace finsent::eval
