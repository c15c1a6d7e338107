#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsf/date.hpp"
#include "tsf/indicators.hpp"
#include "tsf/preprocess.hpp"
#include "tsf/series_frame.hpp"
#include "tsf/trainer.hpp"

namespace tsf {

/// 1 - SSE/SST. Throws std::invalid_argument on length mismatch, n < 2, or a
/// constant `actual` (R² undefined).
double r2_score(std::span<const double> actual, std::span<const double> predicted);

struct EvaluationResult {
    double r2 = 0.0;
    std::vector<Date> dates;
    Series actual;     // price units
    Series predicted;  // price units
    Series residuals;  // actual - predicted
};

/// Throws std::invalid_argument naming the first column where `columns`
/// departs from the checkpoint's manifest.
void check_manifest(const Checkpoint& checkpoint, std::span<const std::string> columns);

/// Scaled windows of an (unscaled) feature frame split the way the
/// checkpoint was trained.
struct PreparedData {
    SeriesFrame scaled;
    DatasetSplit split;
};
PreparedData prepare_for_checkpoint(const Checkpoint& checkpoint, const SeriesFrame& features);

/// One-step-ahead predictions over every window of `test` from true inputs,
/// mapped back to price units before scoring.
EvaluationResult evaluate(const Checkpoint& checkpoint, const WindowedDataset& test, const ScalerParams& scaler);

/// `date,actual,predicted,residual`.
void write_evaluation_csv(std::ostream& out, const EvaluationResult& result);

struct ForecastPath {
    std::vector<Date> dates;
    Series close;
    bool truncated = false;  // a non-finite prediction cut the path short

    std::size_t horizon() const noexcept { return close.size(); }
};

/// Families present in `manifest`, with window/span parameters taken from
/// the column names and MACD/Bollinger parameters from `base`.
indicators::IndicatorConfig config_from_manifest(std::span<const std::string> manifest,
                                                 const indicators::IndicatorConfig& base = {});

/// Recursive projection. Each step predicts the next close from the last
/// lookback rows, appends a synthetic bar on the next weekday (open, high and
/// low equal to the predicted close, volume and other passthrough columns
/// carried forward), recomputes the engineered features for that bar, and
/// slides the window. `features` is the unscaled feature frame in manifest
/// order.
ForecastPath forecast_recursive(const Checkpoint& checkpoint, const SeriesFrame& features, std::size_t horizon,
                                const indicators::IndicatorConfig& cfg);

/// `date,projected_close`.
void write_forecast_csv(std::ostream& out, const ForecastPath& path);

}  // namespace tsf
