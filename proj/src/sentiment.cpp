#include "finsent/sentiment.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "finsent/csv.hpp"
#include "finsent/error.hpp"
#include "finsent/hash.hpp"

namespace finsent::sentiment {

namespace {

double parse_double(const std::string& text, std::string_view what) {
  std::string s = csv::trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::BadFormat, "cannot parse " + std::string(what) + " '" + text + "'");
  }
  return v;
}

const std::string& cell(const std::vector<std::string>& row, std::size_t col) {
  static const std::string empty;
  return col < row.size() ? row[col] : empty;
}

}  // namespace

bool SentimentTriple::valid() const noexcept {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return in_unit(positive) && in_unit(negative) && in_unit(neutral) &&
         std::abs(positive + negative + neutral - 1.0) <= 1e-3;
}

void SentimentConfig::validate() const {
  if (!(threshold_s > 0.0)) throw Error(ErrorCode::NonPositiveThreshold, "threshold_s must be > 0");
  if (horizon_k < 1) throw Error(ErrorCode::InvalidArgument, "horizon_k must be >= 1");
}

double scalar_score(const SentimentTriple& t) noexcept { return t.positive - t.negative; }

double compute_return(double open_t, double close_tk) {
  if (!(open_t > 0.0)) throw Error(ErrorCode::NonPositiveOpen, "open price must be > 0");
  return (close_tk - open_t) / open_t;
}

int nsi_label(double return_frac, double threshold_s) {
  if (!(threshold_s > 0.0)) throw Error(ErrorCode::NonPositiveThreshold, "threshold must be > 0");
  if (return_frac > threshold_s) return 1;
  if (return_frac < -threshold_s) return -1;
  return 0;
}

double aggregate_day(std::span<const double> scores) noexcept {
  if (scores.empty()) return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

DailyBuild build_daily_records(const market::JoinedSeries& series, const ScoreMap& scored,
                               const SentimentConfig& cfg) {
  cfg.validate();
  DailyBuild out;
  const std::size_t n = series.rows.size();
  out.records.reserve(n);
  std::vector<double> scores;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& row = series.rows[t];
    DailyRecord rec;
    rec.date = row.bar.date;
    rec.ticker = series.ticker;
    rec.open = row.bar.open;
    rec.close = row.bar.close;
    rec.volume = row.bar.volume;

    std::size_t ahead = t + static_cast<std::size_t>(cfg.horizon_k) - 1;
    if (ahead >= n) {
      ahead = t;
      rec.return_fallback = true;
      ++out.fallback_rows;
    }
    rec.return_frac = compute_return(rec.open, series.rows[ahead].bar.close);
    rec.nsi = nsi_label(rec.return_frac, cfg.threshold_s);

    scores.clear();
    for (const auto& item : row.news) {
      auto it = scored.find(title_hash(item.title));
      if (it == scored.end()) {
        if (cfg.strict) throw Error(ErrorCode::MissingScore, item.title);
        ++out.missing_scores;
        scores.push_back(0.0);
        continue;
      }
      scores.push_back(scalar_score(it->second));
    }
    rec.headline_count = row.news.size();
    rec.sentiment_score = aggregate_day(scores);
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<FixtureRow> load_fixture(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_date = table.require_column("date");
  const std::size_t c_ticker = table.require_column("ticker");
  const std::size_t c_hash = table.require_column("title_hash");
  const std::size_t c_pos = table.require_column("positive");
  const std::size_t c_neg = table.require_column("negative");
  const std::size_t c_neu = table.require_column("neutral");

  std::vector<FixtureRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    FixtureRow row;
    auto date = parse_date(cell(r, c_date));
    if (!date) throw Error(ErrorCode::BadFormat, "bad date '" + cell(r, c_date) + "' in " + path.string());
    row.date = *date;
    row.ticker = csv::trim(cell(r, c_ticker));
    row.title_hash = csv::trim(cell(r, c_hash));
    row.triple = {parse_double(cell(r, c_pos), "positive"), parse_double(cell(r, c_neg), "negative"),
                  parse_double(cell(r, c_neu), "neutral")};
    if (!row.triple.valid()) {
      throw Error(ErrorCode::InvalidTriple, "sentiment triple for " + row.title_hash +
                                                " is not a probability vector");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fixture_csv(const std::vector<FixtureRow>& rows) {
  std::ostringstream out;
  out << "date,ticker,title_hash,positive,negative,neutral\n";
  for (const auto& r : rows) {
    out << csv::join_row({r.date.iso(), r.ticker, r.title_hash, csv::format_double(r.triple.positive),
                          csv::format_double(r.triple.negative), csv::format_double(r.triple.neutral)})
        << '\n';
  }
  return out.str();
}

ScoreMap to_score_map(const std::vector<FixtureRow>& rows) {
  ScoreMap map;
  for (const auto& r : rows) map.emplace(r.title_hash, r.triple);
  return map;
}

std::string daily_records_csv(const std::vector<DailyRecord>& records) {
  std::ostringstream out;
  out << "date,ticker,open,close,volume,return,nsi,sentiment_score,headline_count,return_fallback\n";
  for (const auto& r : records) {
    out << csv::join_row({r.date.iso(), r.ticker, csv::format_double(r.open), csv::format_double(r.close),
                          csv::format_double(r.volume), csv::format_double(r.return_frac),
                          std::to_string(r.nsi), csv::format_double(r.sentiment_score),
                          std::to_string(r.headline_count), r.return_fallback ? "1" : "0"})
        << '\n';
  }
  return out.str();
}

std::vector<DailyRecord> load_daily_records(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const char* names[] = {"date", "ticker", "open", "close", "volume", "return",
                         "nsi", "sentiment_score", "headline_count", "return_fallback"};
  std::size_t col[10];
  for (int i = 0; i < 10; ++i) col[i] = table.require_column(names[i]);

  std::vector<DailyRecord> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    DailyRecord rec;
    auto date = parse_date(cell(r, col[0]));
    if (!date) throw Error(ErrorCode::BadFormat, "bad date in " + path.string());
    rec.date = *date;
    rec.ticker = csv::trim(cell(r, col[1]));
    rec.open = parse_double(cell(r, col[2]), "open");
    rec.close = parse_double(cell(r, col[3]), "close");
    rec.volume = parse_double(cell(r, col[4]), "volume");
    rec.return_frac = parse_double(cell(r, col[5]), "return");
    rec.nsi = static_cast<int>(parse_double(cell(r, col[6]), "nsi"));
    rec.sentiment_score = parse_double(cell(r, col[7]), "sentiment_score");
    rec.headline_count = static_cast<std::size_t>(parse_double(cell(r, col[8]), "headline_count"));
    rec.return_fallback = csv::trim(cell(r, col[9])) == "1";
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace finsent::sentiment
