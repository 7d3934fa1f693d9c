#include "finsent/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "finsent/csv.hpp"
#include "finsent/error.hpp"
#include "finsent/hash.hpp"
#include "finsent/io.hpp"

namespace finsent::config {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + msg);
}

bool only_comment(std::string_view rest) {
  const std::string t = csv::trim(rest);
  return t.empty() || t.front() == '#';
}

std::string parse_string(std::string_view v, std::size_t line) {
  std::string out;
  for (std::size_t i = 1; i < v.size(); ++i) {
    char c = v[i];
    if (c == '"') {
      if (!only_comment(v.substr(i + 1))) fail(line, "trailing characters after string");
      return out;
    }
    if (c == '\\') {
      if (++i >= v.size()) break;
      switch (v[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(line, "unsupported escape");
      }
      continue;
    }
    out.push_back(c);
  }
  fail(line, "unterminated string");
}

Value parse_value(std::string_view raw, std::size_t line) {
  std::string v = csv::trim(raw);
  if (v.empty()) fail(line, "missing value");
  if (v.front() == '"') return parse_string(v, line);
  if (v.front() == '\'') {
    auto end = v.find('\'', 1);
    if (end == std::string::npos) fail(line, "unterminated literal string");
    if (!only_comment(std::string_view(v).substr(end + 1))) fail(line, "trailing characters after string");
    return v.substr(1, end - 1);
  }
  if (auto hash = v.find('#'); hash != std::string::npos) v = csv::trim(v.substr(0, hash));
  if (v == "true") return true;
  if (v == "false") return false;
  std::string digits;
  for (char c : v) {
    if (c != '_') digits.push_back(c);
  }
  const bool looks_float = digits.find_first_of(".eE") != std::string::npos ||
                           digits == "inf" || digits == "nan";
  if (!looks_float) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (ec == std::errc() && p == digits.data() + digits.size()) return i;
  }
  double d = 0.0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
  if (ec == std::errc() && p == digits.data() + digits.size()) return d;
  fail(line, "cannot parse value '" + v + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.empty() || path.is_absolute()) return path;
  return base / path;
}

}  // namespace

Document Document::parse(std::string_view text) {
  Document doc;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      auto end = t.find(']');
      if (end == std::string::npos || (t.size() > 1 && t[1] == '[')) fail(line_no, "malformed section header");
      section = csv::trim(std::string_view(t).substr(1, end - 1));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    std::string key = csv::trim(std::string_view(t).substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    std::string full = section.empty() ? key : section + "." + key;
    if (doc.values_.count(full)) fail(line_no, "duplicate key '" + full + "'");
    doc.values_[full] = parse_value(std::string_view(t).substr(eq + 1), line_no);
  }
  return doc;
}

Document Document::load(const std::filesystem::path& path) {
  try {
    return parse(io::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::FileUnreadable) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

std::optional<std::string> Document::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (auto s = std::get_if<std::string>(&it->second)) return *s;
  throw Error(ErrorCode::ConfigError, key + " must be a string");
}

std::optional<std::int64_t> Document::get_int(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (auto v = std::get_if<std::int64_t>(&it->second)) return *v;
  throw Error(ErrorCode::ConfigError, key + " must be an integer");
}

std::optional<double> Document::get_double(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (auto v = std::get_if<double>(&it->second)) return *v;
  if (auto v = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*v);
  throw Error(ErrorCode::ConfigError, key + " must be a number");
}

std::optional<bool> Document::get_bool(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (auto v = std::get_if<bool>(&it->second)) return *v;
  throw Error(ErrorCode::ConfigError, key + " must be true or false");
}

SentimentSource RunConfig::sentiment_source() const {
  const bool fixture = !sentiment_fixture.empty();
  const bool service = !sentiment_url.empty();
  if (fixture && service) {
    throw Error(ErrorCode::ConfigError, "configure either a sentiment fixture or a service URL, not both");
  }
  if (fixture) return SentimentSource::Fixture;
  if (service) return SentimentSource::Service;
  return SentimentSource::Neutral;
}

void RunConfig::validate() const {
  if (!market::valid_ticker(ticker)) throw Error(ErrorCode::ConfigError, "invalid ticker '" + ticker + "'");
  sentiment_source();
  try {
    sentiment.validate();
    arch.validate();
    train.validate();
    arima.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  if (lookback == 0) throw Error(ErrorCode::ConfigError, "lookback must be >= 1");
  if (rolling_window == 0) throw Error(ErrorCode::ConfigError, "rolling_window must be >= 1");
  if (sentiment_model != "finbert" && sentiment_model != "bert-base") {
    throw Error(ErrorCode::ConfigError, "sentiment model must be finbert or bert-base");
  }
}

std::string RunConfig::digest() const {
  std::ostringstream s;
  s << ticker << '|' << sentiment.threshold_s << '|' << sentiment.horizon_k << '|' << sentiment.strict << '|'
    << lookback << '|' << split.train_frac << '|' << split.val_frac << '|' << use_nsi << use_volume << '|'
    << arch.input_dim << ',' << arch.layer1_units << ',' << arch.layer2_units << ',' << arch.dense_units << ','
    << static_cast<int>(arch.dense_activation) << '|' << train.epochs << ',' << train.batch_size << ','
    << train.learning_rate << ',' << train.beta1 << ',' << train.beta2 << ',' << train.epsilon << ','
    << train.patience << ',' << train.shuffle << '|' << arima.p << arima.d << arima.q << arima_intercept << arima_select << '|'
    << join.attach_horizon_days << '|' << sentiment_model << '|' << seed;
  return to_hex16(fnv1a64(s.str()));
}

RunConfig RunConfig::from_document(const Document& d, const std::filesystem::path& base) {
  RunConfig c;
  std::set<std::string> known;
  auto str = [&](const char* k, std::string& out) {
    known.insert(k);
    if (auto v = d.get_string(k)) out = *v;
  };
  auto path = [&](const char* k, std::filesystem::path& out) {
    known.insert(k);
    if (auto v = d.get_string(k)) out = resolve(base, *v);
  };
  auto size = [&](const char* k, std::size_t& out) {
    known.insert(k);
    if (auto v = d.get_int(k)) {
      if (*v < 0) throw Error(ErrorCode::ConfigError, std::string(k) + " must be >= 0");
      out = static_cast<std::size_t>(*v);
    }
  };
  auto integer = [&](const char* k, int& out) {
    known.insert(k);
    if (auto v = d.get_int(k)) out = static_cast<int>(*v);
  };
  auto number = [&](const char* k, double& out) {
    known.insert(k);
    if (auto v = d.get_double(k)) out = *v;
  };
  auto flag = [&](const char* k, bool& out) {
    known.insert(k);
    if (auto v = d.get_bool(k)) out = *v;
  };

  str("ticker", c.ticker);
  known.insert("seed");
  if (auto v = d.get_int("seed")) c.seed = static_cast<std::uint64_t>(*v);
  path("output_dir", c.output_dir);
  flag("deterministic", c.deterministic);

  path("data.news", c.news_path);
  path("data.prices", c.prices_path);
  path("data.sentiment_fixture", c.sentiment_fixture);
  str("data.sentiment_url", c.sentiment_url);
  str("data.news_date_column", c.news_schema.date_column);
  str("data.news_ticker_column", c.news_schema.ticker_column);
  str("data.news_title_column", c.news_schema.title_column);
  integer("data.attach_horizon_days", c.join.attach_horizon_days);

  number("sentiment.threshold", c.sentiment.threshold_s);
  integer("sentiment.horizon_k", c.sentiment.horizon_k);
  flag("sentiment.strict", c.sentiment.strict);
  str("sentiment.model", c.sentiment_model);

  size("features.lookback", c.lookback);
  number("features.train_frac", c.split.train_frac);
  number("features.val_frac", c.split.val_frac);
  flag("features.use_nsi", c.use_nsi);
  flag("features.use_volume", c.use_volume);
  size("features.rolling_window", c.rolling_window);

  size("lstm.layer1_units", c.arch.layer1_units);
  size("lstm.layer2_units", c.arch.layer2_units);
  size("lstm.dense_units", c.arch.dense_units);
  known.insert("lstm.dense_activation");
  if (auto act = d.get_string("lstm.dense_activation")) {
    if (*act == "identity") {
      c.arch.dense_activation = lstm::DenseActivation::Identity;
    } else if (*act == "relu") {
      c.arch.dense_activation = lstm::DenseActivation::Relu;
    } else {
      throw Error(ErrorCode::ConfigError, "lstm.dense_activation must be identity or relu");
    }
  }
  size("lstm.epochs", c.train.epochs);
  size("lstm.batch_size", c.train.batch_size);
  number("lstm.learning_rate", c.train.learning_rate);
  number("lstm.beta1", c.train.beta1);
  number("lstm.beta2", c.train.beta2);
  number("lstm.epsilon", c.train.epsilon);
  size("lstm.patience", c.train.patience);
  flag("lstm.shuffle", c.train.shuffle);

  integer("arima.p", c.arima.p);
  integer("arima.d", c.arima.d);
  integer("arima.q", c.arima.q);
  flag("arima.intercept", c.arima_intercept);
  flag("arima.select", c.arima_select);
  integer("arima.max_p", c.arima_max_p);
  integer("arima.max_d", c.arima_max_d);
  integer("arima.max_q", c.arima_max_q);

  for (const auto& [key, value] : d.values()) {
    if (!known.count(key)) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  }
  return c;
}

}  // namespace finsent::config
