#include <cstdlib>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "finsent/csv.hpp"

#include "finsent/cli.hpp"
#include "finsent/io.hpp"
#include "test_support.hpp"

using namespace finsent;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_subcommand(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return (testing::fixture_dir() / name).string(); }

}  // namespace

TEST_CASE("usage errors exit 2") {
  auto r = invoke({"frobnicate"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("error: stage=cli code=UsageError") == 0);
  CHECK(r.err.find("full-run") != std::string::npos);
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"train-lstm", "--variant", "bogus"}).code == cli::kExitUsage);
  CHECK(invoke({"--kernels", "imaginary", "ingest"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("score with both a fixture and a service URL is a configuration error") {
  auto r = invoke({"score", "--ticker", "MSFT", "--sentiment-fixture", fixture("sentiment.csv"),
                "--sentiment-url", "http://127.0.0.1:9"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("code=ConfigError") != std::string::npos);
}

TEST_CASE("bad config values are configuration errors") {
  CHECK(invoke({"ingest", "--config", "/nonexistent.toml"}).code == cli::kExitUsage);
  CHECK(invoke({"ingest", "--ticker", "MSFT", "--arima-order", "1-1-1"}).code == cli::kExitUsage);
  CHECK(invoke({"ingest", "--ticker", "bad ticker"}).code == cli::kExitUsage);
}

TEST_CASE("stage failures exit 1 with a single error line") {
  testing::TempDir dir("cli_fail");
  auto r = invoke({"ingest", "--ticker", "MSFT", "--news", (dir / "none.csv").string(), "--prices",
                fixture("prices.csv"), "--out", dir.path().string()});
  CHECK(r.code == cli::kExitStageError);
  CHECK(r.err.find("error: stage=ingest code=FileUnreadable message=\"") == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  auto later = invoke({"prepare", "--ticker", "MSFT", "--out", dir.path().string()});
  CHECK(later.code == cli::kExitStageError);
}

TEST_CASE("stages run one at a time and resume from disk") {
  testing::TempDir dir("cli_stages");
  const std::vector<std::string> common{"--config", fixture("run.toml"), "--out", dir.path().string(),
                                        "--epochs", "3"};
  auto with = [&](std::string stage, std::vector<std::string> extra = {}) {
    std::vector<std::string> a{std::move(stage)};
    a.insert(a.end(), common.begin(), common.end());
    a.insert(a.end(), extra.begin(), extra.end());
    return invoke(a);
  };
  CHECK(with("ingest").code == 0);
  CHECK(std::filesystem::exists(dir / "raw/news.csv"));
  CHECK(with("score").code == 0);
  CHECK(std::filesystem::exists(dir / "scored/daily.csv"));
  CHECK(with("prepare").code == 0);
  CHECK(std::filesystem::exists(dir / "prepared/with_sentiment.wset"));
  CHECK(with("train-lstm", {"--variant", "price_only"}).code == 0);
  CHECK(std::filesystem::exists(dir / "models/lstm_price_only.ckpt"));
  CHECK_FALSE(std::filesystem::exists(dir / "models/lstm_with_sentiment.ckpt"));
  CHECK(with("fit-arima").code == 0);
  CHECK(with("evaluate").code == 0);
  auto cmp = with("compare");
  CHECK(cmp.code == 0);
  CHECK(cmp.out.find("ARIMA") != std::string::npos);
  auto report = nlohmann::json::parse(io::read_file(dir / "reports/report.json"));
  CHECK(report["rows"].size() == 2);
}

TEST_CASE("full run on the bundled fixture") {
  testing::TempDir dir("cli_full");
  auto r = invoke({"full-run", "--ticker", "MSFT", "--config", fixture("run.toml"), "--out", dir.path().string()});
  REQUIRE(r.code == 0);
  auto report = nlohmann::json::parse(io::read_file(dir / "reports/report.json"));
  CHECK(report["ticker"] == "MSFT");
  REQUIRE(report["rows"].size() >= 2);
  std::set<std::string> names;
  for (const auto& row : report["rows"]) names.insert(row["model"].get<std::string>());
  CHECK(names == std::set<std::string>{"ARIMA", "LSTM", "Sentiment+LSTM"});
  CHECK_FALSE(report.contains("generated_at"));
  auto preds = csv::read_file(dir / "reports/predictions_lstm_with_sentiment.csv");
  CHECK_FALSE(preds.rows.empty());
  CHECK(std::filesystem::exists(dir / "reports/rolling_stats.csv"));
  CHECK(std::filesystem::exists(dir / "reports/report.txt"));
}
