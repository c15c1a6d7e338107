#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsf/date.hpp"

namespace tsf {

/// Missing-value sentinel inside frames and series.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

using Series = std::vector<double>;

/// Column-oriented table of real-or-missing values indexed by strictly
/// increasing dates. Every column has exactly `rows()` entries.
class SeriesFrame {
public:
    SeriesFrame() = default;

    /// Throws std::invalid_argument unless `dates` is strictly increasing.
    explicit SeriesFrame(std::vector<Date> dates);

    std::size_t rows() const noexcept { return dates_.size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return dates_.empty(); }

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<std::string>& column_names() const noexcept { return names_; }

    bool has_column(std::string_view name) const noexcept;
    std::size_t column_index(std::string_view name) const;

    const Series& column(std::string_view name) const;
    const Series& column(std::size_t index) const { return columns_.at(index); }

    /// Appends a column. Throws on duplicate name or length mismatch.
    void add_column(std::string name, Series values);
    /// Replaces an existing column or appends a new one.
    void set_column(std::string_view name, Series values);

    /// Rows [begin, end).
    SeriesFrame slice_rows(std::size_t begin, std::size_t end) const;
    /// Projection onto `names`, in the given order.
    SeriesFrame select(std::span<const std::string> names) const;

    friend bool operator==(const SeriesFrame& a, const SeriesFrame& b);

private:
    std::vector<Date> dates_;
    std::vector<std::string> names_;
    std::vector<Series> columns_;
};

/// Canonical CSV: `date,<columns...>` header, ISO dates, shortest round-trip
/// numbers, empty cell for missing.
void write_frame_csv(std::ostream& out, const SeriesFrame& frame);
SeriesFrame read_frame_csv(std::istream& in);

void write_frame_csv_file(const std::string& path, const SeriesFrame& frame);
SeriesFrame read_frame_csv_file(const std::string& path);

}  // namespace tsf
