#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include "finsent/config.hpp"
#include "finsent/io.hpp"
#include "finsent/pipeline.hpp"
#include "finsent/sentiment_client.hpp"
#include "test_support.hpp"

using namespace finsent;
using namespace finsent::sentiment;

namespace {

/// In-process stand-in for the scoring sidecar. Texts containing "up" score
/// positive, "down" negative, anything else neutral.
class MockService {
 public:
  MockService() {
    server_.Post("/api/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auto body = nlohmann::json::parse(req.body);
      const auto& texts = body.at("texts");
      last_model_ = body.at("model").get<std::string>();
      max_batch_ = std::max<std::size_t>(max_batch_, texts.size());
      if (texts.empty()) {
        res.status = 400;
        res.set_content(R"({"error":"empty texts"})", "application/json");
        return;
      }
      nlohmann::json out = nlohmann::json::array();
      for (const auto& t : texts) {
        const auto s = t.get<std::string>();
        if (mode_ == "invalid") {
          out.push_back({{"positive", 0.9}, {"negative", 0.9}, {"neutral", 0.1}, {"truncated", false}});
        } else if (s.find("up") != std::string::npos) {
          out.push_back({{"positive", 0.8}, {"negative", 0.1}, {"neutral", 0.1}, {"truncated", false}});
        } else if (s.find("down") != std::string::npos) {
          out.push_back({{"positive", 0.05}, {"negative", 0.9}, {"neutral", 0.05}, {"truncated", s.size() > 20}});
        } else {
          out.push_back({{"positive", 0.1}, {"negative", 0.1}, {"neutral", 0.8}, {"truncated", false}});
        }
      }
      if (mode_ == "short") out.erase(out.end() - 1);
      res.set_content(out.dump(), "application/json");
    });
    server_.Get("/api/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","models_loaded":["finbert"]})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api/"; }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::size_t max_batch_ = 0;
  std::string last_model_;
  std::string mode_;
};

}  // namespace

TEST_CASE("client scores texts in order and batches large requests") {
  MockService mock;
  ServiceClient client(mock.url(), 5);
  std::vector<std::string> texts;
  for (int i = 0; i < 600; ++i) texts.push_back(i % 3 == 0 ? "shares up" : (i % 3 == 1 ? "shares down sharply today" : "flat"));
  auto scored = client.score(texts, "finbert");
  REQUIRE(scored.size() == texts.size());
  CHECK(mock.requests_ == 3);
  CHECK(mock.max_batch_ == ServiceClient::kMaxTextsPerRequest);
  CHECK(mock.last_model_ == "finbert");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CHECK(scored[i].triple.valid());
    if (i % 3 == 0) CHECK(scored[i].triple.positive == 0.8);
    if (i % 3 == 1) CHECK(scored[i].truncated);
    if (i % 3 == 2) CHECK(scored[i].triple.neutral == 0.8);
  }
}

TEST_CASE("client health") {
  MockService mock;
  ServiceClient client(mock.url(), 5);
  auto h = client.health();
  CHECK(h.status == "ok");
  REQUIRE(h.models_loaded.size() == 1);
  CHECK(h.models_loaded[0] == "finbert");
}

TEST_CASE("client rejects bad replies") {
  MockService mock;
  ServiceClient client(mock.url(), 5);
  CHECK(client.score({}).empty());
  CHECK(mock.requests_ == 0);
  mock.mode_ = "invalid";
  CHECK_ERROR(client.score({"a"}), InvalidTriple);
  mock.mode_ = "short";
  CHECK_ERROR(client.score({"a", "b"}), ServiceError);
}

TEST_CASE("client reports unreachable services and bad URLs") {
  std::unique_ptr<MockService> mock = std::make_unique<MockService>();
  const std::string url = mock->url();
  mock.reset();
  ServiceClient client(url, 1);
  CHECK_ERROR(client.score({"a"}), ServiceError);
  CHECK_ERROR(client.health(), ServiceError);
  CHECK_ERROR(ServiceClient("localhost:8000"), ConfigError);
}

TEST_CASE("score stage pulls triples from the service") {
  MockService mock;
  testing::TempDir dir("svc_stage");
  config::RunConfig cfg;
  cfg.ticker = "MSFT";
  cfg.news_path = testing::fixture_dir() / "news.csv";
  cfg.prices_path = testing::fixture_dir() / "prices.csv";
  cfg.sentiment_url = mock.url();
  cfg.output_dir = dir.path();
  pipeline::ingest(cfg);
  pipeline::score(cfg);
  auto scored = load_fixture(dir / "scored/sentiment.csv");
  CHECK(scored.size() > 300);
  for (const auto& r : scored) CHECK(r.triple.valid());
  auto log = io::read_file(dir / "scored/score_log.json");
  CHECK(log.find("\"service\"") != std::string::npos);
  auto daily = load_daily_records(dir / "scored/daily.csv");
  CHECK(daily.size() == 199);
}
