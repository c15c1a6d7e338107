#include "tsf/timeseries_store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "tsf/csv.hpp"

namespace tsf {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<std::size_t> find_header(const std::vector<std::string>& header, std::string_view name) {
    const auto key = lower(name);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (lower(header[i]) == key) return i;
    return std::nullopt;
}

double fundamentals_field(const FundamentalsRecord& r, std::size_t i) {
    switch (i) {
        case 0: return r.equity;
        case 1: return r.total_asset;
        case 2: return r.sales;
        case 3: return r.profit_before_tax;
        case 4: return r.profit_after_tax;
        case 5: return r.cash_dividend_pct;
        case 6: return r.stock_dividend_pct;
        case 7: return r.face_value;
        case 8: return r.paid_up_capital;
        case 9: return r.num_shares;
    }
    return kMissing;
}

double& fundamentals_field(FundamentalsRecord& r, std::size_t i) {
    switch (i) {
        case 0: return r.equity;
        case 1: return r.total_asset;
        case 2: return r.sales;
        case 3: return r.profit_before_tax;
        case 4: return r.profit_after_tax;
        case 5: return r.cash_dividend_pct;
        case 6: return r.stock_dividend_pct;
        case 7: return r.face_value;
        case 8: return r.paid_up_capital;
        default: return r.num_shares;
    }
}

}  // namespace

bool PriceBar::is_consistent() const noexcept {
    if (!is_missing(volume) && volume < 0.0) return false;
    if (is_missing(open) || is_missing(high) || is_missing(low) || is_missing(close)) return true;
    return low <= std::min(open, close) && high >= std::max(open, close);
}

CsvSchema CsvSchema::ohlcv() {
    CsvSchema s;
    s.columns = {{"open", "Open"}, {"high", "High"}, {"low", "Low"}, {"close", "Close"}, {"volume", "Volume"}};
    return s;
}

ParsedFrame parse_ohlcv_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV input is empty (no header row)");
    const auto header = csv::split_line(line);

    const auto date_idx = find_header(header, schema.date_column);
    if (!date_idx) throw std::runtime_error("missing mapped column '" + schema.date_column + "'");
    std::vector<std::size_t> col_idx;
    for (const auto& [canonical, source] : schema.columns) {
        auto idx = find_header(header, source);
        if (!idx) throw std::runtime_error("missing mapped column '" + source + "'");
        col_idx.push_back(*idx);
    }

    IngestStats stats;
    // Later rows overwrite earlier ones with the same date.
    std::map<Date, std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++stats.rows_in;
        const auto fields = csv::split_line(line);
        const auto date = *date_idx < fields.size() ? Date::parse(fields[*date_idx], schema.date_format)
                                                    : std::nullopt;
        if (!date) {
            ++stats.unparsable_dates;
            continue;
        }
        std::vector<double> values(col_idx.size(), kMissing);
        for (std::size_t c = 0; c < col_idx.size(); ++c) {
            if (col_idx[c] >= fields.size()) {
                ++stats.coerced_cells;
                continue;
            }
            values[c] = csv::parse_double(fields[col_idx[c]]);
            if (is_missing(values[c]) && !fields[col_idx[c]].empty()) ++stats.coerced_cells;
        }
        auto [it, inserted] = rows.insert_or_assign(*date, std::move(values));
        if (!inserted) ++stats.duplicate_dates;
    }
    if (rows.empty()) throw std::runtime_error("no parsable rows in CSV input");

    std::vector<Date> dates;
    std::vector<Series> cols(col_idx.size());
    dates.reserve(rows.size());
    for (auto& [date, values] : rows) {
        dates.push_back(date);
        for (std::size_t c = 0; c < values.size(); ++c) cols[c].push_back(values[c]);
    }
    SeriesFrame frame{std::move(dates)};
    for (std::size_t c = 0; c < cols.size(); ++c) frame.add_column(schema.columns[c].first, std::move(cols[c]));
    stats.rows_out = frame.rows();

    const bool has_ohlc = frame.has_column("open") && frame.has_column("high") && frame.has_column("low") &&
                          frame.has_column("close");
    if (has_ohlc) {
        for (const auto& bar : to_price_bars(frame)) {
            if (!bar.is_consistent()) {
                stats.ohlc_violations.push_back(bar.date);
                spdlog::warn("OHLC sanity violation on {} (low={}, high={}, open={}, close={}, volume={})",
                             bar.date.iso(), bar.low, bar.high, bar.open, bar.close, bar.volume);
            }
        }
    }
    return {std::move(frame), std::move(stats)};
}

ParsedFrame parse_ohlcv_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return parse_ohlcv_csv(in, schema);
}

std::vector<FundamentalsRecord> parse_fundamentals_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("fundamentals CSV is empty");
    const auto header = csv::split_line(line);
    auto date_idx = find_header(header, "effective_date");
    if (!date_idx) date_idx = find_header(header, "date");
    if (!date_idx) throw std::runtime_error("fundamentals CSV needs an 'effective_date' or 'date' column");

    std::vector<std::optional<std::size_t>> field_idx;
    for (auto name : kFundamentalColumns) field_idx.push_back(find_header(header, name));

    std::vector<FundamentalsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_line(line);
        auto date = *date_idx < fields.size() ? Date::parse_iso(fields[*date_idx]) : std::nullopt;
        if (!date) continue;
        FundamentalsRecord r;
        r.effective_date = *date;
        for (std::size_t f = 0; f < field_idx.size(); ++f) {
            if (field_idx[f] && *field_idx[f] < fields.size())
                fundamentals_field(r, f) = csv::parse_double(fields[*field_idx[f]]);
        }
        records.push_back(r);
    }
    return records;
}

std::vector<FundamentalsRecord> parse_fundamentals_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return parse_fundamentals_csv(in);
}

SeriesFrame forward_fill(const SeriesFrame& frame, std::span<const std::string> columns) {
    for (const auto& name : columns) (void)frame.column_index(name);
    SeriesFrame out = frame;
    for (const auto& name : columns) {
        Series values = frame.column(name);
        double last = kMissing;
        for (auto& v : values) {
            if (is_missing(v))
                v = last;
            else
                last = v;
        }
        out.set_column(name, std::move(values));
    }
    return out;
}

SeriesFrame forward_fill(const SeriesFrame& frame) {
    return forward_fill(frame, frame.column_names());
}

SeriesFrame merge_fundamentals(const SeriesFrame& prices, std::vector<FundamentalsRecord> fundamentals) {
    std::stable_sort(fundamentals.begin(), fundamentals.end(),
                     [](const auto& a, const auto& b) { return a.effective_date < b.effective_date; });
    std::vector<Series> cols(kFundamentalColumns.size(), Series(prices.rows(), kMissing));
    std::size_t next = 0;
    const FundamentalsRecord* current = nullptr;
    for (std::size_t r = 0; r < prices.rows(); ++r) {
        while (next < fundamentals.size() && fundamentals[next].effective_date <= prices.dates()[r])
            current = &fundamentals[next++];
        if (!current) continue;
        for (std::size_t f = 0; f < cols.size(); ++f) cols[f][r] = fundamentals_field(*current, f);
    }
    SeriesFrame out = prices;
    for (std::size_t f = 0; f < cols.size(); ++f) out.add_column(std::string(kFundamentalColumns[f]), std::move(cols[f]));
    return out;
}

std::vector<PriceBar> to_price_bars(const SeriesFrame& frame) {
    auto col = [&](std::string_view name) -> const Series* {
        return frame.has_column(name) ? &frame.column(name) : nullptr;
    };
    const Series* open = col("open");
    const Series* high = col("high");
    const Series* low = col("low");
    const Series* close = col("close");
    const Series* volume = col("volume");
    std::vector<PriceBar> bars(frame.rows());
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        bars[r].date = frame.dates()[r];
        if (open) bars[r].open = (*open)[r];
        if (high) bars[r].high = (*high)[r];
        if (low) bars[r].low = (*low)[r];
        if (close) bars[r].close = (*close)[r];
        if (volume) bars[r].volume = (*volume)[r];
    }
    return bars;
}

}  // namespace tsf
