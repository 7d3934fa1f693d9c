#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "finsent/date.hpp"
#include "finsent/error.hpp"
#include "finsent/sentiment.hpp"

namespace finsent::testing {

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

#define CHECK_ERROR(expr, expected) \
  CHECK(::finsent::testing::error_code_of([&] { (void)(expr); }) == ::finsent::ErrorCode::expected)

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("finsent_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path source_dir() { return FINSENT_SOURCE_DIR; }
inline std::filesystem::path fixture_dir() { return source_dir() / "data" / "fixtures" / "msft200"; }

/// Consecutive calendar days starting 2020-01-01 with a gently varying close.
inline std::vector<sentiment::DailyRecord> synthetic_records(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<sentiment::DailyRecord> out;
  double close = 100.0;
  const Date start(2020, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    sentiment::DailyRecord r;
    r.date = start + static_cast<std::int32_t>(i);
    r.ticker = "TEST";
    r.open = close;
    close = close * (1.0 + 0.01 * noise(rng));
    r.close = close;
    r.volume = 1e6 * (1.0 + 0.1 * std::abs(noise(rng)));
    r.return_frac = (r.close - r.open) / r.open;
    r.nsi = r.return_frac > 0.01 ? 1 : (r.return_frac < -0.01 ? -1 : 0);
    r.sentiment_score = std::tanh(noise(rng));
    r.headline_count = 1;
    out.push_back(r);
  }
  return out;
}

}  // namespace finsent::testing
