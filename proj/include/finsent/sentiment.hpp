#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsent/date.hpp"
#include "finsent/market_data.hpp"

namespace finsent::sentiment {

struct SentimentTriple {
  double positive = 0.0;
  double negative = 0.0;
  double neutral = 1.0;

  bool valid() const noexcept;
};

struct SentimentConfig {
  double threshold_s = 0.01;
  int horizon_k = 1;
  /// Throw MissingScore instead of treating an unscored headline as neutral.
  bool strict = false;

  void validate() const;
};

struct DailyRecord {
  Date date;
  std::string ticker;
  double open = 0.0;
  double close = 0.0;
  double volume = 0.0;
  double return_frac = 0.0;
  int nsi = 0;
  double sentiment_score = 0.0;
  std::size_t headline_count = 0;
  /// The k-day-ahead close fell past the end of the series; return and NSI
  /// were computed with k = 1 instead.
  bool return_fallback = false;
};

/// P(positive) - P(negative).
double scalar_score(const SentimentTriple& t) noexcept;

/// (close_tk - open_t) / open_t.
double compute_return(double open_t, double close_tk);

/// +1 above s, -1 below -s, 0 on the closed middle band.
int nsi_label(double return_frac, double threshold_s);

/// Mean of the day's scores; 0 for a day without headlines.
double aggregate_day(std::span<const double> scores) noexcept;

/// Keyed by title_hash().
using ScoreMap = std::unordered_map<std::string, SentimentTriple>;

struct DailyBuild {
  std::vector<DailyRecord> records;
  std::size_t missing_scores = 0;
  std::size_t fallback_rows = 0;
};

/// One record per trading date. The k-day return for date t uses the close
/// k-1 trading days later, so k = 1 is the same-day open-to-close return.
DailyBuild build_daily_records(const market::JoinedSeries& series, const ScoreMap& scored,
                               const SentimentConfig& cfg);

struct FixtureRow {
  Date date;
  std::string ticker;
  std::string title_hash;
  SentimentTriple triple;
};

/// Reads the scored-headline CSV (date,ticker,title_hash,positive,negative,neutral).
std::vector<FixtureRow> load_fixture(const std::filesystem::path& path);
std::string fixture_csv(const std::vector<FixtureRow>& rows);
ScoreMap to_score_map(const std::vector<FixtureRow>& rows);

std::string daily_records_csv(const std::vector<DailyRecord>& records);
std::vector<DailyRecord> load_daily_records(const std::filesystem::path& path);

}  // namespace finsent::sentiment
