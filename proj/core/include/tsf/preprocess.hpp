#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsf/date.hpp"
#include "tsf/series_frame.hpp"

namespace tsf {

/// Min-Max parameters of one column.
struct ColumnScale {
    std::string name;
    double min = 0.0;
    double max = 0.0;

    /// (x - min) / (max - min); 0 for a degenerate column.
    double scale(double x) const noexcept;
    /// Exact affine inverse; degenerate columns invert to `min`.
    double unscale(double y) const noexcept;
    bool operator==(const ColumnScale&) const = default;
};

struct ScalerParams {
    std::vector<ColumnScale> columns;  // feature-manifest order

    const ColumnScale& at(std::string_view name) const;
    bool operator==(const ScalerParams&) const = default;
};

struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
};

/// Per-column min/max over `rows` only. Throws std::invalid_argument on an
/// empty range or a column with no observed value in the range.
ScalerParams fit_minmax(const SeriesFrame& frame, RowRange rows);

/// Throws std::invalid_argument when frame columns and params differ.
SeriesFrame transform(const SeriesFrame& frame, const ScalerParams& params);
SeriesFrame inverse_transform(const SeriesFrame& frame, const ScalerParams& params);

/// Supervised windows: sample i reads rows [i, i + lookback) of every column
/// and targets `target_column` at row i + lookback.
class WindowedDataset {
public:
    WindowedDataset() = default;
    WindowedDataset(std::size_t lookback, std::size_t n_features, std::vector<double> inputs, Series targets,
                    std::vector<Date> sample_dates);

    std::size_t size() const noexcept { return targets_.size(); }
    bool empty() const noexcept { return targets_.empty(); }
    std::size_t lookback() const noexcept { return lookback_; }
    std::size_t n_features() const noexcept { return n_features_; }

    /// Row-major (lookback x n_features) block of sample i.
    std::span<const double> window(std::size_t i) const;
    /// All samples, row-major (size x lookback x n_features).
    std::span<const double> inputs() const noexcept { return inputs_; }
    const Series& targets() const noexcept { return targets_; }
    const std::vector<Date>& sample_dates() const noexcept { return sample_dates_; }

    /// Samples [begin, end).
    WindowedDataset subset(std::size_t begin, std::size_t end) const;
    /// Samples at the given indices, in order.
    WindowedDataset gather(std::span<const std::size_t> indices) const;

private:
    std::size_t lookback_ = 0;
    std::size_t n_features_ = 0;
    std::vector<double> inputs_;
    Series targets_;
    std::vector<Date> sample_dates_;
};

/// Throws std::invalid_argument when rows <= lookback or target_column is
/// unknown.
WindowedDataset make_windows(const SeriesFrame& frame, std::size_t lookback, std::string_view target_column);

struct SplitSpec {
    double train_fraction = 0.8;
    std::size_t lookback = 60;

    void validate() const;
    /// floor(train_fraction * n_samples).
    std::size_t train_samples(std::size_t n_samples) const;
    /// Frame rows touched by the training windows of a frame with `rows` rows
    /// (inputs and targets), i.e. the span a scaler may be fitted on.
    RowRange training_rows(std::size_t rows) const;
};

struct DatasetSplit {
    WindowedDataset train;
    WindowedDataset test;
};

/// First floor(f * n) samples train, the rest test. Throws on n < 2.
DatasetSplit chronological_split(const WindowedDataset& dataset, const SplitSpec& spec);

}  // namespace tsf
