#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsf/date.hpp"
#include "tsf/series_frame.hpp"

namespace tsf::indicators {

struct MacdConfig {
    int fast = 12;
    int slow = 26;
    int signal = 9;
};

struct BollingerConfig {
    int window = 20;
    double num_std = 2.0;
};

/// Which engineered columns to append and with what parameters. A disengaged
/// optional or empty list disables that family.
struct IndicatorConfig {
    bool returns = true;
    std::vector<int> sma_windows{5, 10};
    std::vector<int> ema_spans{5, 12};
    std::optional<MacdConfig> macd = MacdConfig{};
    std::optional<BollingerConfig> bollinger = BollingerConfig{};
    bool range_position = true;
    bool temporal = true;

    /// Throws std::invalid_argument on windows/spans < 1, bollinger window < 2,
    /// or macd.fast >= macd.slow.
    void validate() const;

    /// Every feature family disabled.
    static IndicatorConfig none();
};

/// ln(close[t] / close[t-1]); first entry missing. Throws
/// std::invalid_argument on a non-positive price where a return is needed;
/// the message names the date when `dates` is supplied.
Series log_return(std::span<const double> close, std::span<const Date> dates = {});

/// close[t] / close[t-1] - 1; first entry missing. A zero previous price
/// yields missing and a warning.
Series pct_return(std::span<const double> close);

/// Trailing mean over `window` values. Positions before the first full window,
/// or whose window holds a missing value, are missing.
Series sma(std::span<const double> x, int window);

/// Non-adjusted exponential moving average, alpha = 2 / (span + 1). The
/// recurrence starts at the first observed value; missing inputs produce
/// missing outputs and leave the state untouched.
Series ema(std::span<const double> x, int span);

/// As `ema`, but positions with fewer than `min_periods` observations so far
/// are reported missing.
Series ema(std::span<const double> x, int span, int min_periods);

struct MacdLines {
    Series macd;
    Series signal;
};

/// macd = ema(fast) - ema(slow), signal = ema(macd, signal). Each EMA reports
/// missing until it has seen `span` observations, so the signal line is
/// defined from index slow + signal - 2.
MacdLines macd(std::span<const double> close, const MacdConfig& cfg = {});

struct BollingerBands {
    Series middle;
    Series upper;
    Series lower;
};

/// Rolling mean +/- num_std population standard deviations.
BollingerBands bollinger(std::span<const double> close, int window = 20, double num_std = 2.0);

struct TemporalFeatures {
    Series weekday;       // Monday = 0
    Series month;         // 1..12
    Series week_of_year;  // ISO-8601, 1..53
};

TemporalFeatures temporal_features(std::span<const Date> dates);

/// (close - low) / (high - low); missing when high == low.
Series range_position(std::span<const double> high, std::span<const double> low, std::span<const double> close);

struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<double> values;  // row-major, labels.size()^2

    std::size_t size() const noexcept { return labels.size(); }
    double at(std::size_t i, std::size_t j) const { return values.at(i * labels.size() + j); }
};

/// Pairwise-complete Pearson correlations. Zero-variance or under-observed
/// pairs are reported missing.
CorrelationMatrix pearson_matrix(const SeriesFrame& frame, std::span<const std::string> columns);

/// Square CSV with the labels as header row and first column.
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);

/// Ordered output columns of build_feature_frame for a given source column set.
std::vector<std::string> feature_manifest(const IndicatorConfig& cfg, std::span<const std::string> source_columns);

/// Source columns plus every configured feature in manifest order, without
/// any trimming or filling.
SeriesFrame append_features(const SeriesFrame& source, const IndicatorConfig& cfg);

struct FeatureFrame {
    SeriesFrame frame;
    std::size_t warmup_trimmed = 0;
    std::vector<std::string> dropped_columns;  // passthrough columns with no observations
};

/// Appends every configured feature, orders columns per feature_manifest,
/// drops leading rows until all columns are observed, and forward-fills any
/// interior gaps left after that trim.
FeatureFrame build_feature_frame(const SeriesFrame& source, const IndicatorConfig& cfg = {});

}  // namespace tsf::indicators
