#include "finsent/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "finsent/config.hpp"
#include "finsent/error.hpp"
#include "finsent/kernels.hpp"
#include "finsent/pipeline.hpp"

namespace finsent::cli {

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> ticker;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> news;
  std::optional<std::string> prices;
  std::optional<std::string> fixture;
  std::optional<std::string> url;
  std::optional<std::size_t> lookback;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> threshold;
  std::optional<int> horizon_k;
  bool deterministic = false;
  bool use_nsi = false;
  bool use_volume = false;
  std::string arima_order;
  std::string variant = "both";
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "Run configuration (TOML)");
  app->add_option("--ticker", o.ticker, "Ticker symbol");
  app->add_option("--out", o.out_dir, "Output directory");
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--news", o.news, "News CSV");
  app->add_option("--prices", o.prices, "Price CSV");
  app->add_option("--sentiment-fixture", o.fixture, "Scored-headline CSV");
  app->add_option("--sentiment-url", o.url, "Scoring service base URL");
  app->add_option("--lookback", o.lookback, "Lookback window in trading days");
  app->add_option("--epochs", o.epochs, "LSTM training epochs");
  app->add_option("--batch-size", o.batch_size, "LSTM mini-batch size");
  app->add_option("--learning-rate", o.learning_rate, "Adam learning rate");
  app->add_option("--threshold", o.threshold, "NSI return threshold");
  app->add_option("--horizon-k", o.horizon_k, "Return horizon in trading days");
  app->add_option("--arima-order", o.arima_order, "ARIMA order as p,d,q");
  app->add_flag("--deterministic", o.deterministic, "Omit timestamps from reports");
  app->add_flag("--use-nsi", o.use_nsi, "Add the NSI channel to the features");
  app->add_flag("--use-volume", o.use_volume, "Add scaled volume to the features");
}

config::RunConfig resolve(const Overrides& o) {
  config::RunConfig cfg;
  if (!o.config_path.empty()) {
    const std::filesystem::path p(o.config_path);
    cfg = config::RunConfig::from_document(config::Document::load(p), p.parent_path());
  }
  if (o.ticker) cfg.ticker = *o.ticker;
  for (char& c : cfg.ticker) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  if (o.out_dir) cfg.output_dir = *o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.news) cfg.news_path = *o.news;
  if (o.prices) cfg.prices_path = *o.prices;
  if (o.fixture) cfg.sentiment_fixture = *o.fixture;
  if (o.url) cfg.sentiment_url = *o.url;
  if (const char* env = std::getenv("FINSENT_SENTIMENT_URL"); env && *env) cfg.sentiment_url = env;
  if (o.lookback) cfg.lookback = *o.lookback;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.batch_size) cfg.train.batch_size = *o.batch_size;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.threshold) cfg.sentiment.threshold_s = *o.threshold;
  if (o.horizon_k) cfg.sentiment.horizon_k = *o.horizon_k;
  if (o.deterministic) cfg.deterministic = true;
  if (o.use_nsi) cfg.use_nsi = true;
  if (o.use_volume) cfg.use_volume = true;
  if (!o.arima_order.empty()) {
    char comma1 = 0, comma2 = 0;
    std::istringstream in(o.arima_order);
    if (!(in >> cfg.arima.p >> comma1 >> cfg.arima.d >> comma2 >> cfg.arima.q) || comma1 != ',' || comma2 != ',') {
      throw Error(ErrorCode::ConfigError, "--arima-order expects p,d,q");
    }
  }
  cfg.validate();
  return cfg;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c == '\n' ? ' ' : c);
  }
  out.push_back('"');
  return out;
}

void report_error(std::ostream& err, std::string_view stage, std::string_view code, std::string_view message) {
  err << "error: stage=" << stage << " code=" << code << " message=" << quote(message) << "\n";
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"finsent: news sentiment + LSTM/ARIMA next-day close forecasting", "finsent"};
  app.require_subcommand(1, 1);
  app.fallthrough(false);
  std::string kernel = "auto";
  app.add_option("--kernels", kernel, "Kernel variant: auto, scalar, avx2, neon");

  Overrides o;
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "Load and validate news and price CSVs"},
      {"score", "Join news to trading days and attach sentiment"},
      {"prepare", "Scale features, split by date, build lookback windows"},
      {"train-lstm", "Train the LSTM forecaster(s)"},
      {"fit-arima", "Fit the ARIMA baseline on the scaled close"},
      {"evaluate", "Score every trained model on the validation/test windows"},
      {"compare", "Write the model comparison report"},
      {"full-run", "Run every stage in order"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : stages) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    if (name == "train-lstm") {
      sub->add_option("--variant", o.variant, "with_sentiment, price_only or both")
          ->check(CLI::IsMember({"with_sentiment", "price_only", "both"}));
    }
    subs.push_back(sub);
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "cli", "UsageError", e.what());
    err << app.help();
    return kExitUsage;
  }
  if (kernel != "auto" && !kernels::select(kernel)) {
    report_error(err, "cli", "UsageError", "kernel variant '" + kernel + "' is not available");
    return kExitUsage;
  }

  std::string stage;
  for (CLI::App* s : subs) {
    if (s->parsed()) stage = s->get_name();
  }

  config::RunConfig cfg;
  try {
    cfg = resolve(o);
    if (stage == "score" || stage == "full-run") cfg.sentiment_source();
  } catch (const Error& e) {
    report_error(err, stage, to_string(e.code()), e.what());
    return kExitUsage;
  }

  try {
    if (stage == "ingest") {
      pipeline::ingest(cfg);
    } else if (stage == "score") {
      pipeline::score(cfg);
    } else if (stage == "prepare") {
      pipeline::prepare(cfg);
    } else if (stage == "train-lstm") {
      if (o.variant != "price_only") pipeline::train_lstm(cfg, pipeline::Variant::WithSentiment);
      if (o.variant != "with_sentiment") pipeline::train_lstm(cfg, pipeline::Variant::PriceOnly);
    } else if (stage == "fit-arima") {
      pipeline::fit_arima(cfg);
    } else if (stage == "evaluate") {
      pipeline::evaluate(cfg);
    } else if (stage == "compare") {
      out << pipeline::compare(cfg);
    } else if (stage == "full-run") {
      out << pipeline::full_run(cfg);
    }
  } catch (const Error& e) {
    report_error(err, stage, to_string(e.code()), e.what());
    return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitStageError;
  } catch (const std::exception& e) {
    report_error(err, stage, "Internal", e.what());
    return kExitStageError;
  }
  return kExitOk;
}

}  // namespace finsent::cli
