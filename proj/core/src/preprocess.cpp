#include "tsf/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsf {

double ColumnScale::scale(double x) const noexcept {
    if (max == min) return 0.0;
    return (x - min) / (max - min);
}

double ColumnScale::unscale(double y) const noexcept {
    if (max == min) return min;
    return y * (max - min) + min;
}

const ColumnScale& ScalerParams::at(std::string_view name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw std::invalid_argument("scaler has no column '" + std::string(name) + "'");
}

ScalerParams fit_minmax(const SeriesFrame& frame, RowRange rows) {
    if (rows.begin >= rows.end) throw std::invalid_argument("fit_minmax: empty row range");
    if (rows.end > frame.rows()) throw std::invalid_argument("fit_minmax: row range exceeds frame");
    ScalerParams params;
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& values = frame.column(c);
        double lo = kMissing;
        double hi = kMissing;
        for (std::size_t r = rows.begin; r < rows.end; ++r) {
            const double v = values[r];
            if (is_missing(v)) continue;
            if (is_missing(lo) || v < lo) lo = v;
            if (is_missing(hi) || v > hi) hi = v;
        }
        if (is_missing(lo))
            throw std::invalid_argument("fit_minmax: column '" + frame.column_names()[c] +
                                        "' has no observed values in the fit range");
        params.columns.push_back({frame.column_names()[c], lo, hi});
    }
    return params;
}

namespace {

void check_alignment(const SeriesFrame& frame, const ScalerParams& params) {
    if (frame.cols() != params.columns.size())
        throw std::invalid_argument("scaler has " + std::to_string(params.columns.size()) + " columns, frame has " +
                                    std::to_string(frame.cols()));
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        if (frame.column_names()[c] != params.columns[c].name)
            throw std::invalid_argument("scaler column '" + params.columns[c].name + "' does not match frame column '" +
                                        frame.column_names()[c] + "'");
    }
}

template <typename Fn>
SeriesFrame map_columns(const SeriesFrame& frame, const ScalerParams& params, Fn fn) {
    check_alignment(frame, params);
    SeriesFrame out{frame.dates()};
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        Series values = frame.column(c);
        for (auto& v : values)
            if (!is_missing(v)) v = fn(params.columns[c], v);
        out.add_column(frame.column_names()[c], std::move(values));
    }
    return out;
}

}  // namespace

SeriesFrame transform(const SeriesFrame& frame, const ScalerParams& params) {
    return map_columns(frame, params, [](const ColumnScale& s, double v) { return s.scale(v); });
}

SeriesFrame inverse_transform(const SeriesFrame& frame, const ScalerParams& params) {
    return map_columns(frame, params, [](const ColumnScale& s, double v) { return s.unscale(v); });
}

WindowedDataset::WindowedDataset(std::size_t lookback, std::size_t n_features, std::vector<double> inputs,
                                 Series targets, std::vector<Date> sample_dates)
    : lookback_(lookback),
      n_features_(n_features),
      inputs_(std::move(inputs)),
      targets_(std::move(targets)),
      sample_dates_(std::move(sample_dates)) {
    if (inputs_.size() != targets_.size() * lookback_ * n_features_ || sample_dates_.size() != targets_.size())
        throw std::invalid_argument("WindowedDataset: inconsistent shapes");
}

std::span<const double> WindowedDataset::window(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("WindowedDataset::window index out of range");
    const std::size_t stride = lookback_ * n_features_;
    return std::span<const double>(inputs_).subspan(i * stride, stride);
}

WindowedDataset WindowedDataset::subset(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw std::out_of_range("WindowedDataset::subset bad range");
    const std::size_t stride = lookback_ * n_features_;
    return WindowedDataset(
        lookback_, n_features_,
        std::vector<double>(inputs_.begin() + static_cast<std::ptrdiff_t>(begin * stride),
                            inputs_.begin() + static_cast<std::ptrdiff_t>(end * stride)),
        Series(targets_.begin() + static_cast<std::ptrdiff_t>(begin), targets_.begin() + static_cast<std::ptrdiff_t>(end)),
        std::vector<Date>(sample_dates_.begin() + static_cast<std::ptrdiff_t>(begin),
                          sample_dates_.begin() + static_cast<std::ptrdiff_t>(end)));
}

WindowedDataset WindowedDataset::gather(std::span<const std::size_t> indices) const {
    std::vector<double> inputs;
    Series targets;
    std::vector<Date> dates;
    inputs.reserve(indices.size() * lookback_ * n_features_);
    for (auto i : indices) {
        auto w = window(i);
        inputs.insert(inputs.end(), w.begin(), w.end());
        targets.push_back(targets_[i]);
        dates.push_back(sample_dates_[i]);
    }
    return WindowedDataset(lookback_, n_features_, std::move(inputs), std::move(targets), std::move(dates));
}

WindowedDataset make_windows(const SeriesFrame& frame, std::size_t lookback, std::string_view target_column) {
    if (lookback < 1) throw std::invalid_argument("make_windows: lookback must be >= 1");
    if (frame.rows() <= lookback)
        throw std::invalid_argument("make_windows: series of " + std::to_string(frame.rows()) +
                                    " rows is too short for lookback " + std::to_string(lookback));
    const auto& target = frame.column(target_column);
    const std::size_t n = frame.rows() - lookback;
    const std::size_t f = frame.cols();
    std::vector<double> inputs(n * lookback * f);
    Series targets(n);
    std::vector<Date> dates(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < lookback; ++t)
            for (std::size_t c = 0; c < f; ++c) inputs[(i * lookback + t) * f + c] = frame.column(c)[i + t];
        targets[i] = target[i + lookback];
        dates[i] = frame.dates()[i + lookback];
    }
    return WindowedDataset(lookback, f, std::move(inputs), std::move(targets), std::move(dates));
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    if (lookback < 1) throw std::invalid_argument("lookback must be >= 1");
}

std::size_t SplitSpec::train_samples(std::size_t n_samples) const {
    // The epsilon absorbs representation error such as 0.7 * 10 = 6.9999...
    return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n_samples) + 1e-9));
}

RowRange SplitSpec::training_rows(std::size_t rows) const {
    if (rows <= lookback) throw std::invalid_argument("frame too short for lookback");
    return {0, train_samples(rows - lookback) + lookback};
}

DatasetSplit chronological_split(const WindowedDataset& dataset, const SplitSpec& spec) {
    spec.validate();
    if (dataset.size() < 2) throw std::invalid_argument("chronological_split needs at least 2 samples");
    const std::size_t n_train = std::clamp<std::size_t>(spec.train_samples(dataset.size()), 1, dataset.size() - 1);
    return {dataset.subset(0, n_train), dataset.subset(n_train, dataset.size())};
}

}  // namespace tsf
