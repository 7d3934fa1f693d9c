#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "finsent/date.hpp"
#include "finsent/sentiment.hpp"

namespace finsent::features {

enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

std::string_view to_string(Split s) noexcept;

/// Per-feature MinMax state fitted on training rows.
struct ScalerParams {
  std::vector<std::string> names;
  std::vector<double> min;
  std::vector<double> max;

  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const noexcept;

  double scale(std::size_t feature, double x) const noexcept {
    return (x - min[feature]) / (max[feature] - min[feature]);
  }
  double unscale(std::size_t feature, double y) const noexcept {
    return y * (max[feature] - min[feature]) + min[feature];
  }

  std::string to_json() const;
  static ScalerParams from_json(std::string_view text);

  bool operator==(const ScalerParams&) const = default;
};

/// `rows` are training rows only, each holding one value per name.
ScalerParams fit_scaler(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& names);
ScalerParams fit_scaler(std::span<const sentiment::DailyRecord> train_records,
                        const std::vector<std::string>& names);

/// Not clipped: values outside the training range map outside [0, 1].
std::vector<double> transform(std::span<const double> row, const ScalerParams& p);
std::vector<double> inverse_transform(std::span<const double> row, const ScalerParams& p);

struct SplitOptions {
  double train_frac = 0.9;
  double val_frac = 0.09;
};

/// First floor(n*(train_frac - val_frac)) dates train, next floor(n*val_frac)
/// val, the rest test.
std::vector<Split> chronological_split(std::span<const Date> dates, double train_frac, double val_frac);

/// Names understood by feature_value: close, open, volume, return,
/// sentiment_score, nsi. Price and volume channels are MinMax-scaled, the
/// others enter the model as-is.
double feature_value(const sentiment::DailyRecord& record, std::string_view name);
bool is_scaled_feature(std::string_view name);

struct Window {
  Date target_date;
  std::vector<Date> input_dates;
  /// lookback x features, timestep-major.
  std::vector<double> inputs;
  double target = 0.0;
  Split split = Split::Train;
  /// Some input timestep belongs to an earlier split than the target.
  bool crosses_boundary = false;
};

struct WindowSet {
  std::size_t lookback = 0;
  std::vector<std::string> features;
  std::string target;
  std::vector<Window> windows;

  std::size_t feature_count() const noexcept { return features.size(); }
  std::size_t count(Split s) const noexcept;
  std::vector<const Window*> select(Split s) const;
};

WindowSet make_windows(std::span<const sentiment::DailyRecord> records, std::size_t lookback,
                       const std::vector<std::string>& features, const std::string& target,
                       std::span<const Split> tags, const ScalerParams& scaler);

struct PrepareOptions {
  std::size_t lookback = 60;
  std::vector<std::string> features{"close", "sentiment_score"};
  std::string target = "close";
  SplitOptions split;
};

struct Prepared {
  ScalerParams scaler;
  std::vector<Split> record_tags;
  WindowSet windows;
};

/// Split by date, fit the scaler on train-tagged rows, then window.
Prepared prepare(std::span<const sentiment::DailyRecord> records, const PrepareOptions& options);

/// Binary cache layout is described in docs/formats.md.
std::string serialize(const WindowSet& set);
WindowSet deserialize_windows(std::string data);
void save_windows(const WindowSet& set, const std::filesystem::path& path);
WindowSet load_windows(const std::filesystem::path& path);

}  // namespace finsent::features
