#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "finsent/config.hpp"
#include "finsent/evaluation.hpp"

// Resumable pipeline stages. Each stage reads the previous stage's files from
// the output directory and writes its own:
//   raw/       news.csv, prices.csv, ingest_log.json
//   scored/    sentiment.csv, daily.csv, score_log.json
//   prepared/  scaler.json, splits.csv, with_sentiment.wset, price_only.wset
//   models/    lstm_<variant>.ckpt, lstm_<variant>_history.csv, arima.json
//   reports/   eval_<model>.json, predictions_<model>.csv, rolling_stats.csv,
//              report.json, report.txt
namespace finsent::pipeline {

enum class Variant { WithSentiment, PriceOnly };

std::string_view variant_id(Variant v) noexcept;
std::string_view model_name(Variant v) noexcept;
inline constexpr std::string_view kArimaName = "ARIMA";

struct Layout {
  explicit Layout(std::filesystem::path root) : root(std::move(root)) {}
  std::filesystem::path root;

  std::filesystem::path raw() const { return root / "raw"; }
  std::filesystem::path scored() const { return root / "scored"; }
  std::filesystem::path prepared() const { return root / "prepared"; }
  std::filesystem::path models() const { return root / "models"; }
  std::filesystem::path reports() const { return root / "reports"; }
};

void ingest(const config::RunConfig& cfg);
void score(const config::RunConfig& cfg);
void prepare(const config::RunConfig& cfg);
void train_lstm(const config::RunConfig& cfg, Variant variant);
void fit_arima(const config::RunConfig& cfg);
void evaluate(const config::RunConfig& cfg);
/// Writes report.json / report.txt and returns the text table.
std::string compare(const config::RunConfig& cfg);
std::string full_run(const config::RunConfig& cfg);

/// Feature list used by a variant under the given flags.
std::vector<std::string> variant_features(const config::RunConfig& cfg, Variant v);

}  // namespace finsent::pipeline
