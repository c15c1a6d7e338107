#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsf/date.hpp"
#include "tsf/series_frame.hpp"

namespace tsf {

/// One trading day of OHLCV data. Prices in local currency units, volume as
/// a non-negative share count stored as a real.
struct PriceBar {
    Date date;
    double open = kMissing;
    double high = kMissing;
    double low = kMissing;
    double close = kMissing;
    double volume = kMissing;

    /// False when all four prices are present and low/high do not bracket
    /// open and close, or when volume is negative.
    bool is_consistent() const noexcept;
};

/// Sparse company fundamentals effective from `effective_date` onward.
struct FundamentalsRecord {
    Date effective_date;
    double equity = kMissing;
    double total_asset = kMissing;
    double sales = kMissing;
    double profit_before_tax = kMissing;
    double profit_after_tax = kMissing;
    double cash_dividend_pct = kMissing;
    double stock_dividend_pct = kMissing;
    double face_value = kMissing;
    double paid_up_capital = kMissing;
    double num_shares = kMissing;
};

inline constexpr std::array<std::string_view, 10> kFundamentalColumns{
    "equity",       "total_asset",        "sales",      "profit_before_tax", "profit_after_tax",
    "cash_dividend_pct", "stock_dividend_pct", "face_value", "paid_up_capital",   "num_shares"};

inline constexpr std::array<std::string_view, 5> kOhlcvColumns{"open", "high", "low", "close", "volume"};

/// Maps canonical frame column names to CSV header names. Header matching is
/// case-insensitive.
struct CsvSchema {
    std::string date_column = "Date";
    /// Empty means ISO-8601 (`YYYY-MM-DD`); otherwise a strptime-style pattern.
    std::string date_format;
    std::vector<std::pair<std::string, std::string>> columns;

    /// open/high/low/close/volume mapped to Open/High/Low/Close/Volume.
    static CsvSchema ohlcv();
};

struct IngestStats {
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::size_t duplicate_dates = 0;
    std::size_t unparsable_dates = 0;
    std::size_t coerced_cells = 0;
    std::vector<Date> ohlc_violations;
};

struct ParsedFrame {
    SeriesFrame frame;
    IngestStats stats;
};

/// Reads a dated CSV. Rows are sorted by date; duplicate dates keep the last
/// file occurrence; unparsable numeric cells become missing. Throws
/// std::runtime_error for an unreadable file, a missing mapped column, or
/// zero parsable rows.
ParsedFrame parse_ohlcv_csv(const std::string& path, const CsvSchema& schema = CsvSchema::ohlcv());
ParsedFrame parse_ohlcv_csv(std::istream& in, const CsvSchema& schema = CsvSchema::ohlcv());

/// Reads fundamentals: a date column named `effective_date` or `date` plus any
/// subset of the fundamentals fields (case-insensitive names).
std::vector<FundamentalsRecord> parse_fundamentals_csv(const std::string& path);
std::vector<FundamentalsRecord> parse_fundamentals_csv(std::istream& in);

/// Replaces each missing value with the nearest preceding observed value in
/// the same column. Leading gaps remain.
SeriesFrame forward_fill(const SeriesFrame& frame, std::span<const std::string> columns);
/// Forward-fills every column.
SeriesFrame forward_fill(const SeriesFrame& frame);

/// As-of join: each trading date takes the latest record whose effective date
/// is on or before it. Adds one column per entry of kFundamentalColumns.
SeriesFrame merge_fundamentals(const SeriesFrame& prices, std::vector<FundamentalsRecord> fundamentals);

std::vector<PriceBar> to_price_bars(const SeriesFrame& frame);

}  // namespace tsf
