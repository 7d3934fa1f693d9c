#include "finsent/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include "json.hpp"

#include "finsent/csv.hpp"
#include "finsent/error.hpp"

namespace finsent::market {

namespace {

std::string upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

bool parse_number(std::string_view text, double& out) {
  std::string s = csv::trim(text);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

bool valid_ticker(std::string_view ticker) {
  if (ticker.empty() || ticker.size() > 10) return false;
  return std::all_of(ticker.begin(), ticker.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || c == '.' || c == '-';
  });
}

NewsLoad load_news(const std::filesystem::path& path, const NewsSchema& schema,
                   std::string_view ticker_filter) {
  csv::Table table = csv::read_file(path);
  const std::size_t date_col = table.require_column(schema.date_column);
  const std::size_t ticker_col = table.require_column(schema.ticker_column);
  const std::size_t title_col = table.require_column(schema.title_column);
  const std::string filter = upper(std::string(ticker_filter));

  NewsLoad out;
  auto& st = out.stats;
  for (const auto& row : table.rows) {
    ++st.rows_read;
    auto field = [&](std::size_t col) -> std::string_view {
      return col < row.size() ? std::string_view(row[col]) : std::string_view();
    };
    auto date = parse_date(field(date_col));
    if (!date) {
      ++st.dropped_bad_date;
      continue;
    }
    std::string title = csv::trim(field(title_col));
    if (title.empty()) {
      ++st.dropped_empty_title;
      continue;
    }
    std::string ticker = upper(csv::trim(field(ticker_col)));
    if (!valid_ticker(ticker)) {
      ++st.dropped_bad_ticker;
      continue;
    }
    if (!filter.empty() && ticker != filter) continue;
    out.items.push_back({*date, std::move(ticker), std::move(title)});
  }

  std::sort(out.items.begin(), out.items.end());
  auto last = std::unique(out.items.begin(), out.items.end());
  st.duplicates_removed = static_cast<std::size_t>(out.items.end() - last);
  out.items.erase(last, out.items.end());
  st.kept = out.items.size();
  if (out.items.empty()) throw Error(ErrorCode::EmptyDataset, "no valid news rows in " + path.string());
  return out;
}

PriceLoad load_prices(const std::filesystem::path& path, std::string_view ticker) {
  csv::Table table = csv::read_file(path);
  const std::size_t cols[6] = {table.require_column("date"), table.require_column("open"),
                               table.require_column("high"), table.require_column("low"),
                               table.require_column("close"), table.require_column("volume")};
  const std::string symbol = upper(std::string(ticker));

  PriceLoad out;
  auto& st = out.stats;
  for (const auto& row : table.rows) {
    ++st.rows_read;
    auto field = [&](std::size_t col) -> std::string_view {
      return col < row.size() ? std::string_view(row[col]) : std::string_view();
    };
    auto date = parse_date(field(cols[0]));
    PriceBar bar;
    bar.ticker = symbol;
    if (!date || !parse_number(field(cols[1]), bar.open) || !parse_number(field(cols[2]), bar.high) ||
        !parse_number(field(cols[3]), bar.low) || !parse_number(field(cols[4]), bar.close) ||
        !parse_number(field(cols[5]), bar.volume)) {
      ++st.dropped_unparseable;
      continue;
    }
    bar.date = *date;
    const bool positive = bar.open > 0 && bar.high > 0 && bar.low > 0 && bar.close > 0;
    const bool ordered = bar.low <= std::min(bar.open, bar.close) &&
                         bar.high >= std::max(bar.open, bar.close) && bar.volume >= 0;
    if (!positive || !ordered) {
      ++st.dropped_invalid_ohlc;
      continue;
    }
    out.bars.push_back(std::move(bar));
  }

  std::stable_sort(out.bars.begin(), out.bars.end(),
                   [](const PriceBar& a, const PriceBar& b) { return a.date < b.date; });
  auto last = std::unique(out.bars.begin(), out.bars.end(),
                          [](const PriceBar& a, const PriceBar& b) { return a.date == b.date; });
  st.duplicate_dates = static_cast<std::size_t>(out.bars.end() - last);
  out.bars.erase(last, out.bars.end());
  st.kept = out.bars.size();
  if (out.bars.empty()) throw Error(ErrorCode::EmptyDataset, "no valid price rows in " + path.string());
  return out;
}

JoinedSeries join(const std::vector<NewsItem>& news, const std::vector<PriceBar>& prices,
                  std::string_view ticker, const JoinOptions& options) {
  const std::string symbol = upper(std::string(ticker));
  JoinedSeries out;
  out.ticker = symbol;

  for (const auto& bar : prices) {
    if (bar.ticker.empty() || bar.ticker == symbol) out.rows.push_back({bar, {}});
  }
  std::vector<const NewsItem*> mine;
  for (const auto& item : news) {
    if (item.ticker == symbol) mine.push_back(&item);
  }
  if (out.rows.empty() || mine.empty()) {
    throw Error(ErrorCode::EmptyDataset, "join needs news and prices for " + symbol);
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const JoinedRow& a, const JoinedRow& b) { return a.bar.date < b.bar.date; });

  auto [min_news, max_news] = std::minmax_element(
      mine.begin(), mine.end(), [](const NewsItem* a, const NewsItem* b) { return a->date < b->date; });
  const Date first_price = out.rows.front().bar.date;
  const Date last_price = out.rows.back().bar.date;
  if ((*max_news)->date < first_price || (*min_news)->date > last_price) {
    throw Error(ErrorCode::NoOverlap, "news " + (*min_news)->date.iso() + ".." +
                                          (*max_news)->date.iso() + " vs prices " +
                                          first_price.iso() + ".." + last_price.iso());
  }

  for (const NewsItem* item : mine) {
    auto it = std::lower_bound(out.rows.begin(), out.rows.end(), item->date,
                               [](const JoinedRow& row, Date d) { return row.bar.date < d; });
    if (it == out.rows.end() || it->bar.date - item->date > options.attach_horizon_days) {
      ++out.news_dropped_stale;
      continue;
    }
    it->news.push_back(*item);
    ++out.news_attached;
  }
  return out;
}

std::string stats_json(const NewsLoadStats& news, const PriceLoadStats& prices,
                       const JoinedSeries* joined) {
  nlohmann::ordered_json j;
  j["news"] = {{"rows_read", news.rows_read},
               {"dropped_bad_date", news.dropped_bad_date},
               {"dropped_empty_title", news.dropped_empty_title},
               {"dropped_bad_ticker", news.dropped_bad_ticker},
               {"duplicates_removed", news.duplicates_removed},
               {"kept", news.kept}};
  j["prices"] = {{"rows_read", prices.rows_read},
                 {"dropped_unparseable", prices.dropped_unparseable},
                 {"dropped_invalid_ohlc", prices.dropped_invalid_ohlc},
                 {"duplicate_dates", prices.duplicate_dates},
                 {"kept", prices.kept}};
  if (joined) {
    j["join"] = {{"ticker", joined->ticker},
                 {"trading_days", joined->rows.size()},
                 {"news_attached", joined->news_attached},
                 {"news_dropped_stale", joined->news_dropped_stale}};
  }
  return j.dump(2) + "\n";
}

}  // namespace finsent::market
