#pragma once

#include <string>
#include <vector>

#include "finsent/sentiment.hpp"

namespace finsent::sentiment {

struct ScoredText {
  SentimentTriple triple;
  bool truncated = false;
};

struct ServiceHealth {
  std::string status;
  std::vector<std::string> models_loaded;
};

/// HTTP client for the scoring sidecar (POST /v1/score, GET /v1/health).
class ServiceClient {
 public:
  static constexpr std::size_t kMaxTextsPerRequest = 256;

  /// base_url like "http://127.0.0.1:8000" with an optional path prefix.
  explicit ServiceClient(std::string base_url, int timeout_seconds = 60);

  /// Splits into requests of at most kMaxTextsPerRequest texts; output order
  /// matches input order. Every returned triple is validated.
  std::vector<ScoredText> score(const std::vector<std::string>& texts,
                                const std::string& model = "finbert") const;
  ServiceHealth health() const;

 private:
  std::string host_;
  std::string prefix_;
  int timeout_seconds_;
};

}  // namespace finsent::sentiment
