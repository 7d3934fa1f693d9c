#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "finsent/date.hpp"

namespace finsent::market {

struct NewsItem {
  Date date;
  std::string ticker;
  std::string title;

  auto operator<=>(const NewsItem&) const = default;
};

struct PriceBar {
  Date date;
  std::string ticker;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;

  bool operator==(const PriceBar&) const = default;
};

/// Maps the news CSV's header names onto the fields we need. The defaults
/// match the primary archive; the analyst-ratings export uses "stock" for the
/// ticker column.
struct NewsSchema {
  std::string date_column = "date";
  std::string ticker_column = "ticker";
  std::string title_column = "title";
};

struct NewsLoadStats {
  std::size_t rows_read = 0;
  std::size_t dropped_bad_date = 0;
  std::size_t dropped_empty_title = 0;
  std::size_t dropped_bad_ticker = 0;
  std::size_t duplicates_removed = 0;
  std::size_t kept = 0;
};

struct PriceLoadStats {
  std::size_t rows_read = 0;
  std::size_t dropped_unparseable = 0;
  std::size_t dropped_invalid_ohlc = 0;
  std::size_t duplicate_dates = 0;
  std::size_t kept = 0;
};

struct NewsLoad {
  std::vector<NewsItem> items;
  NewsLoadStats stats;
};

struct PriceLoad {
  std::vector<PriceBar> bars;
  PriceLoadStats stats;
};

bool valid_ticker(std::string_view ticker);

/// Loads headlines, dropping rows with unparseable dates, blank titles or
/// malformed tickers, and removing exact (date, ticker, title) duplicates.
/// Output order is (date, ticker, title). An empty `ticker_filter` keeps all
/// tickers.
NewsLoad load_news(const std::filesystem::path& path, const NewsSchema& schema = {},
                   std::string_view ticker_filter = {});

/// Loads daily bars for one ticker, sorted ascending by date. Rows that fail
/// the OHLC sanity check are dropped; a repeated date keeps its first row.
PriceLoad load_prices(const std::filesystem::path& path, std::string_view ticker);

struct JoinedRow {
  PriceBar bar;
  std::vector<NewsItem> news;
};

struct JoinedSeries {
  std::string ticker;
  std::vector<JoinedRow> rows;
  std::size_t news_attached = 0;
  std::size_t news_dropped_stale = 0;
};

struct JoinOptions {
  /// News further than this many calendar days before the next trading date
  /// is dropped.
  int attach_horizon_days = 5;
};

/// One row per price date. Headlines on non-trading days roll forward to the
/// next trading date at or after them.
JoinedSeries join(const std::vector<NewsItem>& news, const std::vector<PriceBar>& prices,
                  std::string_view ticker, const JoinOptions& options = {});

std::string stats_json(const NewsLoadStats& news, const PriceLoadStats& prices,
                       const JoinedSeries* joined);

}  // namespace finsent::market
