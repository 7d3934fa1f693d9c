#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "finsent/arima.hpp"
#include "finsent/features.hpp"
#include "finsent/lstm.hpp"
#include "finsent/market_data.hpp"
#include "finsent/sentiment.hpp"

namespace finsent::config {

using Value = std::variant<std::string, std::int64_t, double, bool>;

/// Flat view of a TOML document: keys are "section.key". Supports the
/// subset the run config needs: [section] headers, bare keys, basic strings,
/// integers, floats, booleans and # comments.
class Document {
 public:
  static Document parse(std::string_view text);
  static Document load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  const std::map<std::string, Value>& values() const noexcept { return values_; }

 private:
  std::map<std::string, Value> values_;
};

enum class SentimentSource { Neutral, Fixture, Service };

struct RunConfig {
  std::string ticker;
  std::filesystem::path news_path;
  std::filesystem::path prices_path;
  std::filesystem::path sentiment_fixture;
  std::string sentiment_url;
  std::string sentiment_model = "finbert";
  market::NewsSchema news_schema;
  market::JoinOptions join;
  sentiment::SentimentConfig sentiment;

  std::size_t lookback = 60;
  features::SplitOptions split;
  bool use_nsi = false;
  bool use_volume = false;

  lstm::LstmArchitecture arch;
  lstm::TrainConfig train;

  arima::ArimaSpec arima;
  bool arima_intercept = true;
  bool arima_select = false;
  int arima_max_p = 5;
  int arima_max_d = 2;
  int arima_max_q = 2;

  std::size_t rolling_window = 20;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;
  bool deterministic = false;

  /// Throws ConfigError when more than one sentiment source is configured.
  SentimentSource sentiment_source() const;
  void validate() const;
  /// Hex digest over every field that influences results.
  std::string digest() const;

  /// Relative paths in the document resolve against `base_dir`.
  static RunConfig from_document(const Document& doc, const std::filesystem::path& base_dir);
};

}  // namespace finsent::config
