#include "finsent/features.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "finsent/error.hpp"
#include "finsent/io.hpp"

namespace finsent::features {

namespace {

constexpr char kWindowMagic[4] = {'F', 'S', 'W', 'S'};
constexpr std::uint32_t kWindowVersion = 1;

}  // namespace

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::size_t ScalerParams::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw Error(ErrorCode::InvalidArgument, "scaler has no feature '" + std::string(name) + "'");
}

bool ScalerParams::contains(std::string_view name) const noexcept {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string ScalerParams::to_json() const {
  nlohmann::ordered_json j;
  j["names"] = names;
  j["min"] = min;
  j["max"] = max;
  return j.dump(2) + "\n";
}

ScalerParams ScalerParams::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    ScalerParams p;
    p.names = j.at("names").get<std::vector<std::string>>();
    p.min = j.at("min").get<std::vector<double>>();
    p.max = j.at("max").get<std::vector<double>>();
    if (p.names.size() != p.min.size() || p.names.size() != p.max.size()) {
      throw Error(ErrorCode::BadFormat, "scaler arrays differ in length");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadFormat, std::string("scaler json: ") + e.what());
  }
}

ScalerParams fit_scaler(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& names) {
  if (rows.size() < 2) throw Error(ErrorCode::TooFewRows, "scaler needs at least 2 training rows");
  ScalerParams p;
  p.names = names;
  p.min.assign(names.size(), INFINITY);
  p.max.assign(names.size(), -INFINITY);
  for (const auto& row : rows) {
    if (row.size() != names.size()) throw Error(ErrorCode::DimensionMismatch, "scaler row width");
    for (std::size_t f = 0; f < names.size(); ++f) {
      p.min[f] = std::min(p.min[f], row[f]);
      p.max[f] = std::max(p.max[f], row[f]);
    }
  }
  for (std::size_t f = 0; f < names.size(); ++f) {
    if (!(p.max[f] > p.min[f])) throw Error(ErrorCode::DegenerateFeature, names[f]);
  }
  return p;
}

ScalerParams fit_scaler(std::span<const sentiment::DailyRecord> train_records,
                        const std::vector<std::string>& names) {
  std::vector<std::vector<double>> rows;
  rows.reserve(train_records.size());
  for (const auto& rec : train_records) {
    std::vector<double> row;
    row.reserve(names.size());
    for (const auto& n : names) row.push_back(feature_value(rec, n));
    rows.push_back(std::move(row));
  }
  return fit_scaler(rows, names);
}

std::vector<double> transform(std::span<const double> row, const ScalerParams& p) {
  if (row.size() != p.names.size()) throw Error(ErrorCode::DimensionMismatch, "transform row width");
  std::vector<double> out(row.size());
  for (std::size_t f = 0; f < row.size(); ++f) out[f] = p.scale(f, row[f]);
  return out;
}

std::vector<double> inverse_transform(std::span<const double> row, const ScalerParams& p) {
  if (row.size() != p.names.size()) throw Error(ErrorCode::DimensionMismatch, "inverse row width");
  std::vector<double> out(row.size());
  for (std::size_t f = 0; f < row.size(); ++f) out[f] = p.unscale(f, row[f]);
  return out;
}

std::vector<Split> chronological_split(std::span<const Date> dates, double train_frac, double val_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0) || !(val_frac >= 0.0 && val_frac < train_frac)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < train_frac < 1 and 0 <= val_frac < train_frac");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) throw Error(ErrorCode::InvalidArgument, "dates must be strictly increasing");
  }
  const double n = static_cast<double>(dates.size());
  // The epsilon absorbs products like 0.9 * 10 = 9.000000000000002 and
  // 0.29 * 100 = 28.999999999999996.
  const auto n_train = static_cast<std::size_t>(std::floor(n * (train_frac - val_frac) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(n * val_frac + 1e-9));
  if (n_train < 2 || n_train + n_val >= dates.size() || (val_frac > 0.0 && n_val == 0)) {
    throw Error(ErrorCode::TooFewRows, std::to_string(dates.size()) + " dates cannot fill every split");
  }
  std::vector<Split> tags(dates.size(), Split::Test);
  std::fill_n(tags.begin(), n_train, Split::Train);
  std::fill_n(tags.begin() + static_cast<std::ptrdiff_t>(n_train), n_val, Split::Val);
  return tags;
}

double feature_value(const sentiment::DailyRecord& r, std::string_view name) {
  if (name == "close") return r.close;
  if (name == "open") return r.open;
  if (name == "volume") return r.volume;
  if (name == "return") return r.return_frac;
  if (name == "sentiment_score") return r.sentiment_score;
  if (name == "nsi") return static_cast<double>(r.nsi);
  throw Error(ErrorCode::InvalidArgument, "unknown feature '" + std::string(name) + "'");
}

bool is_scaled_feature(std::string_view name) {
  return name == "close" || name == "open" || name == "volume";
}

std::size_t WindowSet::count(Split s) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(windows.begin(), windows.end(), [s](const Window& w) { return w.split == s; }));
}

std::vector<const Window*> WindowSet::select(Split s) const {
  std::vector<const Window*> out;
  for (const auto& w : windows) {
    if (w.split == s) out.push_back(&w);
  }
  return out;
}

WindowSet make_windows(std::span<const sentiment::DailyRecord> records, std::size_t lookback,
                       const std::vector<std::string>& features, const std::string& target,
                       std::span<const Split> tags, const ScalerParams& scaler) {
  if (lookback == 0) throw Error(ErrorCode::InvalidArgument, "lookback must be >= 1");
  if (features.empty()) throw Error(ErrorCode::InvalidArgument, "no features selected");
  if (records.size() <= lookback) {
    throw Error(ErrorCode::SeriesTooShort, std::to_string(records.size()) + " records for lookback " +
                                               std::to_string(lookback));
  }
  if (tags.size() != records.size()) throw Error(ErrorCode::LengthMismatch, "split tags vs records");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(records[i - 1].date < records[i].date)) {
      throw Error(ErrorCode::InvalidArgument, "records must be strictly increasing by date");
    }
  }

  // Scaler index per channel, or npos for pass-through channels.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> scale_idx;
  for (const auto& f : features) {
    feature_value(records.front(), f);
    scale_idx.push_back(is_scaled_feature(f) ? scaler.index_of(f) : npos);
  }
  feature_value(records.front(), target);
  const std::size_t target_idx = is_scaled_feature(target) ? scaler.index_of(target) : npos;

  const std::size_t nf = features.size();
  std::vector<double> channel(records.size() * nf);
  for (std::size_t t = 0; t < records.size(); ++t) {
    for (std::size_t f = 0; f < nf; ++f) {
      double v = feature_value(records[t], features[f]);
      channel[t * nf + f] = scale_idx[f] == npos ? v : scaler.scale(scale_idx[f], v);
    }
  }

  WindowSet set;
  set.lookback = lookback;
  set.features = features;
  set.target = target;
  set.windows.reserve(records.size() - lookback);
  for (std::size_t i = 0; i + lookback < records.size(); ++i) {
    const std::size_t ti = i + lookback;
    Window w;
    w.target_date = records[ti].date;
    const double raw_target = feature_value(records[ti], target);
    w.target = target_idx == npos ? raw_target : scaler.scale(target_idx, raw_target);
    w.split = tags[ti];
    w.input_dates.reserve(lookback);
    for (std::size_t t = i; t < ti; ++t) {
      w.input_dates.push_back(records[t].date);
      if (tags[t] != w.split) w.crosses_boundary = true;
    }
    w.inputs.assign(channel.begin() + static_cast<std::ptrdiff_t>(i * nf),
                    channel.begin() + static_cast<std::ptrdiff_t>(ti * nf));
    set.windows.push_back(std::move(w));
  }
  return set;
}

Prepared prepare(std::span<const sentiment::DailyRecord> records, const PrepareOptions& options) {
  std::vector<Date> dates;
  dates.reserve(records.size());
  for (const auto& r : records) dates.push_back(r.date);

  Prepared out;
  out.record_tags = chronological_split(dates, options.split.train_frac, options.split.val_frac);

  std::vector<std::string> scaled;
  auto add = [&](const std::string& name) {
    if (is_scaled_feature(name) && std::find(scaled.begin(), scaled.end(), name) == scaled.end()) {
      scaled.push_back(name);
    }
  };
  add(options.target);
  for (const auto& f : options.features) add(f);

  std::vector<sentiment::DailyRecord> train_rows;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (out.record_tags[i] == Split::Train) train_rows.push_back(records[i]);
  }
  out.scaler = fit_scaler(train_rows, scaled);
  out.windows = make_windows(records, options.lookback, options.features, options.target,
                             out.record_tags, out.scaler);
  return out;
}

std::string serialize(const WindowSet& set) {
  io::BinaryWriter w;
  w.bytes(std::string_view(kWindowMagic, 4));
  w.u32(kWindowVersion);
  w.u64(set.lookback);
  w.u64(set.features.size());
  for (const auto& f : set.features) w.str(f);
  w.str(set.target);
  w.u64(set.windows.size());
  for (const auto& win : set.windows) {
    w.i64(win.target_date.days());
    w.u8(static_cast<std::uint8_t>(win.split));
    w.u8(win.crosses_boundary ? 1 : 0);
    w.f64(win.target);
    for (Date d : win.input_dates) w.i64(d.days());
    w.f64s(win.inputs);
  }
  return w.buffer();
}

WindowSet deserialize_windows(std::string data) {
  io::BinaryReader r(std::move(data));
  if (r.bytes(4) != std::string_view(kWindowMagic, 4)) throw Error(ErrorCode::BadFormat, "not a window cache");
  if (auto v = r.u32(); v != kWindowVersion) {
    throw Error(ErrorCode::BadFormat, "unsupported window cache version " + std::to_string(v));
  }
  WindowSet set;
  set.lookback = r.u64();
  const std::uint64_t nf = r.u64();
  for (std::uint64_t i = 0; i < nf; ++i) set.features.push_back(r.str());
  set.target = r.str();
  const std::uint64_t nw = r.u64();
  set.windows.resize(nw);
  for (auto& win : set.windows) {
    win.target_date = Date(static_cast<std::int32_t>(r.i64()));
    const auto split = r.u8();
    if (split > 2) throw Error(ErrorCode::BadFormat, "bad split tag");
    win.split = static_cast<Split>(split);
    win.crosses_boundary = r.u8() != 0;
    win.target = r.f64();
    win.input_dates.resize(set.lookback);
    for (Date& d : win.input_dates) d = Date(static_cast<std::int32_t>(r.i64()));
    win.inputs.resize(set.lookback * nf);
    r.f64s(win.inputs);
  }
  if (!r.at_end()) throw Error(ErrorCode::BadFormat, "trailing bytes in window cache");
  return set;
}

void save_windows(const WindowSet& set, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize(set));
}

WindowSet load_windows(const std::filesystem::path& path) { return deserialize_windows(io::read_file(path)); }

}  // namespace finsent::features
