#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsent/date.hpp"
#include "finsent/features.hpp"

namespace finsent::eval {

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

Metrics metrics(std::span<const double> pred, std::span<const double> actual);

/// Stable hash of (ticker, target dates, scaled targets) of the test windows.
std::string test_set_digest(std::string_view ticker, std::span<const features::Window* const> test_windows);

struct PredictionRow {
  Date date;
  features::Split split;
  double actual_scaled;
  double predicted_scaled;
  double actual_close;
  double predicted_close;
};

struct EvaluatedRun {
  std::string model;
  std::string ticker;
  std::string test_digest;
  std::optional<double> train_mse;
  std::optional<double> val_mse;
  /// Test split, scaled target units.
  Metrics test;
  /// Test split, price units.
  Metrics test_price;
  /// Validation and test windows in date order.
  std::vector<PredictionRow> predictions;

  std::string to_json() const;
  static EvaluatedRun from_json(std::string_view text);
};

/// Fills val/test metrics from the predictions; train_mse is left to the caller.
void score_predictions(EvaluatedRun& run);

struct ReportMetadata {
  std::string ticker;
  std::string first_date;
  std::string last_date;
  std::string config_digest;
};

struct EvalReport {
  ReportMetadata metadata;
  std::vector<EvaluatedRun> rows;

  std::string to_text() const;
  /// `generated_at` is omitted when empty so deterministic runs compare bytewise.
  std::string to_json(const std::string& generated_at = {}) const;
};

/// Sorted by validation MSE (missing values last), ties by model name.
/// Throws MismatchedTestSets when the runs were scored on different test windows.
EvalReport compare(std::vector<EvaluatedRun> runs, ReportMetadata metadata);

/// date,actual_close,predicted_close over the test range; 12 significant digits.
std::string predictions_csv(const EvaluatedRun& run);

/// date,rolling_mean,rolling_std; `dates[i]` labels the window ending at i.
std::string rolling_stats_csv(std::span<const Date> dates, std::span<const double> closes, std::size_t window);

}  // namespace finsent::eval
