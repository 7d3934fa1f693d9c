#include "finsent/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "finsent/arima.hpp"
#include "finsent/csv.hpp"
#include "finsent/error.hpp"
#include "finsent/hash.hpp"
#include "finsent/io.hpp"
#include "finsent/lstm.hpp"
#include "finsent/market_data.hpp"
#include "finsent/sentiment.hpp"
#include "finsent/sentiment_client.hpp"

namespace finsent::pipeline {

namespace fs = std::filesystem;
using features::Split;

namespace {

std::string news_csv(const std::vector<market::NewsItem>& items) {
  std::ostringstream out;
  out << "date,ticker,title\n";
  for (const auto& n : items) out << csv::join_row({n.date.iso(), n.ticker, n.title}) << '\n';
  return out.str();
}

std::string prices_csv(const std::vector<market::PriceBar>& bars) {
  std::ostringstream out;
  out << "date,open,high,low,close,volume\n";
  for (const auto& b : bars) {
    out << csv::join_row({b.date.iso(), csv::format_double(b.open), csv::format_double(b.high),
                          csv::format_double(b.low), csv::format_double(b.close), csv::format_double(b.volume)})
        << '\n';
  }
  return out.str();
}

void require_file(const fs::path& p, std::string_view produced_by) {
  if (!fs::exists(p)) {
    throw Error(ErrorCode::FileUnreadable, p.string() + " is missing; run '" + std::string(produced_by) + "' first");
  }
}

features::PrepareOptions prepare_options(const config::RunConfig& cfg, Variant v) {
  features::PrepareOptions o;
  o.lookback = cfg.lookback;
  o.features = variant_features(cfg, v);
  o.target = "close";
  o.split = cfg.split;
  return o;
}

std::string splits_csv(const std::vector<sentiment::DailyRecord>& records, const std::vector<Split>& tags) {
  std::ostringstream out;
  out << "date,split\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << records[i].date.iso() << ',' << features::to_string(tags[i]) << '\n';
  }
  return out.str();
}

std::vector<Split> load_splits(const fs::path& path, const std::vector<sentiment::DailyRecord>& records) {
  const csv::Table t = csv::read_file(path);
  const std::size_t c_date = t.require_column("date");
  const std::size_t c_split = t.require_column("split");
  if (t.rows.size() != records.size()) throw Error(ErrorCode::BadFormat, "splits.csv does not match daily.csv");
  std::vector<Split> tags;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (c_date >= row.size() || c_split >= row.size() || parse_date(row[c_date]) != records[i].date) {
      throw Error(ErrorCode::BadFormat, "splits.csv row " + std::to_string(i + 1) + " does not match daily.csv");
    }
    const std::string s = csv::trim(row[c_split]);
    tags.push_back(s == "train" ? Split::Train : s == "val" ? Split::Val : Split::Test);
  }
  return tags;
}

lstm::LstmArchitecture architecture_for(const config::RunConfig& cfg, std::size_t input_dim) {
  lstm::LstmArchitecture a = cfg.arch;
  a.input_dim = input_dim;
  return a;
}

std::vector<const features::Window*> eval_windows(const features::WindowSet& set) {
  std::vector<const features::Window*> out;
  for (const auto& w : set.windows) {
    if (w.split != Split::Train) out.push_back(&w);
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view variant_id(Variant v) noexcept {
  return v == Variant::WithSentiment ? "with_sentiment" : "price_only";
}

std::string_view model_name(Variant v) noexcept {
  return v == Variant::WithSentiment ? "Sentiment+LSTM" : "LSTM";
}

std::vector<std::string> variant_features(const config::RunConfig& cfg, Variant v) {
  std::vector<std::string> f{"close"};
  if (v == Variant::WithSentiment) f.push_back("sentiment_score");
  if (cfg.use_nsi) f.push_back("nsi");
  if (cfg.use_volume) f.push_back("volume");
  return f;
}

void ingest(const config::RunConfig& cfg) {
  cfg.validate();
  if (cfg.news_path.empty() || cfg.prices_path.empty()) {
    throw Error(ErrorCode::ConfigError, "ingest needs data.news and data.prices");
  }
  const Layout out(cfg.output_dir);
  const auto news = market::load_news(cfg.news_path, cfg.news_schema, cfg.ticker);
  const auto prices = market::load_prices(cfg.prices_path, cfg.ticker);
  io::write_file_atomic(out.raw() / "news.csv", news_csv(news.items));
  io::write_file_atomic(out.raw() / "prices.csv", prices_csv(prices.bars));
  io::write_file_atomic(out.raw() / "ingest_log.json", market::stats_json(news.stats, prices.stats, nullptr));
}

void score(const config::RunConfig& cfg) {
  cfg.validate();
  const auto source = cfg.sentiment_source();
  const Layout out(cfg.output_dir);
  require_file(out.raw() / "news.csv", "ingest");
  require_file(out.raw() / "prices.csv", "ingest");
  const auto news = market::load_news(out.raw() / "news.csv", {}, cfg.ticker);
  const auto prices = market::load_prices(out.raw() / "prices.csv", cfg.ticker);
  const auto joined = market::join(news.items, prices.bars, cfg.ticker, cfg.join);

  std::vector<sentiment::FixtureRow> rows;
  std::unordered_set<std::string> seen;
  std::vector<const market::NewsItem*> unique_items;
  for (const auto& r : joined.rows) {
    for (const auto& item : r.news) {
      if (seen.insert(title_hash(item.title)).second) unique_items.push_back(&item);
    }
  }

  std::size_t truncated = 0;
  switch (source) {
    case config::SentimentSource::Fixture: {
      auto fixture = sentiment::load_fixture(cfg.sentiment_fixture);
      const auto map = sentiment::to_score_map(fixture);
      for (const auto* item : unique_items) {
        auto it = map.find(title_hash(item->title));
        if (it != map.end()) rows.push_back({item->date, item->ticker, it->first, it->second});
      }
      break;
    }
    case config::SentimentSource::Service: {
      std::vector<std::string> texts;
      for (const auto* item : unique_items) texts.push_back(item->title);
      const sentiment::ServiceClient client(cfg.sentiment_url);
      const auto scored = client.score(texts, cfg.sentiment_model);
      for (std::size_t i = 0; i < unique_items.size(); ++i) {
        rows.push_back({unique_items[i]->date, unique_items[i]->ticker, title_hash(unique_items[i]->title),
                        scored[i].triple});
        truncated += scored[i].truncated ? 1 : 0;
      }
      break;
    }
    case config::SentimentSource::Neutral:
      for (const auto* item : unique_items) {
        rows.push_back({item->date, item->ticker, title_hash(item->title), {0.0, 0.0, 1.0}});
      }
      break;
  }

  const auto built = sentiment::build_daily_records(joined, sentiment::to_score_map(rows), cfg.sentiment);
  io::write_file_atomic(out.scored() / "sentiment.csv", sentiment::fixture_csv(rows));
  io::write_file_atomic(out.scored() / "daily.csv", sentiment::daily_records_csv(built.records));

  nlohmann::ordered_json log;
  log["source"] = source == config::SentimentSource::Fixture   ? "fixture"
                  : source == config::SentimentSource::Service ? "service"
                                                               : "neutral";
  log["trading_days"] = built.records.size();
  log["headlines_attached"] = joined.news_attached;
  log["headlines_dropped_stale"] = joined.news_dropped_stale;
  log["unique_headlines"] = unique_items.size();
  log["missing_scores"] = built.missing_scores;
  log["truncated"] = truncated;
  log["return_fallback_rows"] = built.fallback_rows;
  io::write_file_atomic(out.scored() / "score_log.json", log.dump(2) + "\n");
}

void prepare(const config::RunConfig& cfg) {
  cfg.validate();
  const Layout out(cfg.output_dir);
  require_file(out.scored() / "daily.csv", "score");
  const auto records = sentiment::load_daily_records(out.scored() / "daily.csv");

  const auto with = features::prepare(records, prepare_options(cfg, Variant::WithSentiment));
  const auto price = features::prepare(records, prepare_options(cfg, Variant::PriceOnly));
  io::write_file_atomic(out.prepared() / "scaler.json", with.scaler.to_json());
  io::write_file_atomic(out.prepared() / "splits.csv", splits_csv(records, with.record_tags));
  features::save_windows(with.windows, out.prepared() / "with_sentiment.wset");
  features::save_windows(price.windows, out.prepared() / "price_only.wset");
}

void train_lstm(const config::RunConfig& cfg, Variant variant) {
  cfg.validate();
  const Layout out(cfg.output_dir);
  const auto wpath = out.prepared() / (std::string(variant_id(variant)) + ".wset");
  require_file(wpath, "prepare");
  const auto windows = features::load_windows(wpath);

  lstm::TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  auto model = lstm::init_model(architecture_for(cfg, windows.feature_count()), cfg.seed);
  const auto result = lstm::train(std::move(model), windows, tc);
  const std::string stem = "lstm_" + std::string(variant_id(variant));
  lstm::save_checkpoint(result.model, out.models() / (stem + ".ckpt"));
  io::write_file_atomic(out.models() / (stem + "_history.csv"), lstm::history_csv(result.history));
}

void fit_arima(const config::RunConfig& cfg) {
  cfg.validate();
  const Layout out(cfg.output_dir);
  require_file(out.scored() / "daily.csv", "score");
  require_file(out.prepared() / "scaler.json", "prepare");
  const auto records = sentiment::load_daily_records(out.scored() / "daily.csv");
  const auto scaler = features::ScalerParams::from_json(io::read_file(out.prepared() / "scaler.json"));
  const auto tags = load_splits(out.prepared() / "splits.csv", records);
  const std::size_t ci = scaler.index_of("close");

  std::vector<double> train, val;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double v = scaler.scale(ci, records[i].close);
    if (tags[i] == Split::Train) train.push_back(v);
    if (tags[i] == Split::Val) val.push_back(v);
  }
  arima::ArimaSpec spec = cfg.arima;
  arima::FitOptions options;
  options.include_intercept = cfg.arima_intercept;
  if (cfg.arima_select && !val.empty()) {
    spec = arima::select_order(train, val, cfg.arima_max_p, cfg.arima_max_d, cfg.arima_max_q, options).best;
  }
  const auto fit = arima::fit(train, spec, options);
  io::write_file_atomic(out.models() / "arima.json", fit.to_json());
}

void evaluate(const config::RunConfig& cfg) {
  cfg.validate();
  const Layout out(cfg.output_dir);
  require_file(out.prepared() / "scaler.json", "prepare");
  const auto records = sentiment::load_daily_records(out.scored() / "daily.csv");
  const auto scaler = features::ScalerParams::from_json(io::read_file(out.prepared() / "scaler.json"));
  const std::size_t ci = scaler.index_of("close");

  std::vector<Date> dates;
  std::vector<double> closes;
  for (const auto& r : records) {
    dates.push_back(r.date);
    closes.push_back(r.close);
  }
  if (closes.size() >= cfg.rolling_window) {
    io::write_file_atomic(out.reports() / "rolling_stats.csv",
                          eval::rolling_stats_csv(dates, closes, cfg.rolling_window));
  }

  auto write_run = [&](const eval::EvaluatedRun& run, const std::string& id) {
    io::write_file_atomic(out.reports() / ("eval_" + id + ".json"), run.to_json());
    io::write_file_atomic(out.reports() / ("predictions_" + id + ".csv"), eval::predictions_csv(run));
  };

  bool any = false;
  std::string digest;
  const features::WindowSet* reference = nullptr;
  features::WindowSet sets[2];
  for (Variant v : {Variant::WithSentiment, Variant::PriceOnly}) {
    const std::string stem = "lstm_" + std::string(variant_id(v));
    const auto ckpt = out.models() / (stem + ".ckpt");
    auto& set = sets[v == Variant::WithSentiment ? 0 : 1];
    set = features::load_windows(out.prepared() / (std::string(variant_id(v)) + ".wset"));
    if (!reference) reference = &set;
    if (!fs::exists(ckpt)) continue;
    const auto model = lstm::load_checkpoint(ckpt);

    eval::EvaluatedRun run;
    run.model = std::string(model_name(v));
    run.ticker = cfg.ticker;
    run.test_digest = eval::test_set_digest(cfg.ticker, set.select(Split::Test));
    const auto train_windows = set.select(Split::Train);
    run.train_mse = lstm::evaluate_mse(model, train_windows);
    const auto targets = eval_windows(set);
    const auto preds = lstm::predict_series(model, targets, scaler, "close");
    for (std::size_t i = 0; i < targets.size(); ++i) {
      run.predictions.push_back({targets[i]->target_date, targets[i]->split, targets[i]->target,
                                 preds[i].scaled, scaler.unscale(ci, targets[i]->target), preds[i].price});
    }
    eval::score_predictions(run);
    write_run(run, stem);
    any = true;
  }

  if (fs::exists(out.models() / "arima.json")) {
    const auto fit = arima::ArimaFit::from_json(io::read_file(out.models() / "arima.json"));
    const auto tags = load_splits(out.prepared() / "splits.csv", records);
    const auto last_train = static_cast<std::size_t>(std::count(tags.begin(), tags.end(), Split::Train)) - 1;
    const auto path = arima::forecast(fit, records.size() - 1 - last_train);

    eval::EvaluatedRun run;
    run.model = std::string(kArimaName);
    run.ticker = cfg.ticker;
    run.test_digest = eval::test_set_digest(cfg.ticker, reference->select(Split::Test));
    for (const auto* w : eval_windows(*reference)) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(dates.begin(), dates.end(), w->target_date) - dates.begin());
      const double y = path[idx - last_train - 1];
      run.predictions.push_back({w->target_date, w->split, w->target, y, scaler.unscale(ci, w->target),
                                 scaler.unscale(ci, y)});
    }
    eval::score_predictions(run);
    write_run(run, "arima");
    any = true;
  }
  if (!any) throw Error(ErrorCode::FileUnreadable, "no trained models under " + out.models().string());
}

std::string compare(const config::RunConfig& cfg) {
  cfg.validate();
  const Layout out(cfg.output_dir);
  std::vector<eval::EvaluatedRun> runs;
  std::vector<fs::path> files;
  if (fs::exists(out.reports())) {
    for (const auto& e : fs::directory_iterator(out.reports())) {
      const auto name = e.path().filename().string();
      if (name.rfind("eval_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) runs.push_back(eval::EvaluatedRun::from_json(io::read_file(f)));
  if (runs.empty()) throw Error(ErrorCode::FileUnreadable, "no eval_*.json under " + out.reports().string());

  eval::ReportMetadata meta;
  meta.ticker = cfg.ticker;
  const auto records = sentiment::load_daily_records(out.scored() / "daily.csv");
  if (!records.empty()) {
    meta.first_date = records.front().date.iso();
    meta.last_date = records.back().date.iso();
  }
  meta.config_digest = cfg.digest();
  const auto report = eval::compare(std::move(runs), meta);
  io::write_file_atomic(out.reports() / "report.json", report.to_json(cfg.deterministic ? "" : utc_timestamp()));
  const std::string text = report.to_text();
  io::write_file_atomic(out.reports() / "report.txt", text);
  return text;
}

std::string full_run(const config::RunConfig& cfg) {
  ingest(cfg);
  score(cfg);
  prepare(cfg);
  train_lstm(cfg, Variant::WithSentiment);
  train_lstm(cfg, Variant::PriceOnly);
  fit_arima(cfg);
  evaluate(cfg);
  return compare(cfg);
}

}  // namespace finsent::pipeline
