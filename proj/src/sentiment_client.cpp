#include "finsent/sentiment_client.hpp"

#include "httplib.h"
#include "json.hpp"

#include "finsent/error.hpp"

namespace finsent::sentiment {

ServiceClient::ServiceClient(std::string base_url, int timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "sentiment service URL needs a scheme: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_ = base_url;
  } else {
    host_ = base_url.substr(0, path_start);
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

std::vector<ScoredText> ServiceClient::score(const std::vector<std::string>& texts,
                                             const std::string& model) const {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);

  std::vector<ScoredText> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += kMaxTextsPerRequest) {
    const std::size_t end = std::min(texts.size(), start + kMaxTextsPerRequest);
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                             texts.begin() + static_cast<std::ptrdiff_t>(end));
    body["model"] = model;
    auto res = client.Post(prefix_ + "/v1/score", body.dump(), "application/json");
    if (!res) {
      throw Error(ErrorCode::ServiceError, "POST /v1/score failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::ServiceError,
                  "POST /v1/score returned " + std::to_string(res->status) + ": " + res->body);
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ServiceError, std::string("malformed score reply: ") + e.what());
    }
    if (!reply.is_array() || reply.size() != end - start) {
      throw Error(ErrorCode::ServiceError, "score reply length does not match request");
    }
    for (const auto& item : reply) {
      ScoredText s;
      try {
        s.triple = {item.at("positive").get<double>(), item.at("negative").get<double>(),
                    item.at("neutral").get<double>()};
        s.truncated = item.value("truncated", false);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ServiceError, std::string("malformed score entry: ") + e.what());
      }
      if (!s.triple.valid()) throw Error(ErrorCode::InvalidTriple, "service returned invalid triple");
      out.push_back(s);
    }
  }
  return out;
}

ServiceHealth ServiceClient::health() const {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_seconds_);
  auto res = client.Get(prefix_ + "/v1/health");
  if (!res || res->status != 200) throw Error(ErrorCode::ServiceError, "GET /v1/health failed");
  ServiceHealth h;
  try {
    auto j = nlohmann::json::parse(res->body);
    h.status = j.at("status").get<std::string>();
    h.models_loaded = j.value("models_loaded", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ServiceError, std::string("malformed health reply: ") + e.what());
  }
  return h;
}

}  // namespace finsent::sentiment
