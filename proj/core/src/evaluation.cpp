#include "tsf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "tsf/csv.hpp"

namespace tsf {

namespace {

constexpr std::size_t kPredictChunk = 256;

bool is_generated_feature(std::string_view name) {
    static constexpr std::string_view fixed[] = {"log_return", "pct_return", "macd",    "macd_signal", "bb_upper",
                                                 "bb_lower",   "range_position", "weekday", "month", "week_of_year"};
    if (std::find(std::begin(fixed), std::end(fixed), name) != std::end(fixed)) return true;
    return name.starts_with("sma_") || name.starts_with("ema_");
}

int parse_suffix(std::string_view name, std::string_view prefix) {
    if (!name.starts_with(prefix)) return -1;
    const auto digits = name.substr(prefix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return -1;
    return std::stoi(std::string(digits));
}

}  // namespace

double r2_score(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("r2_score: " + std::to_string(actual.size()) + " actual vs " +
                                    std::to_string(predicted.size()) + " predicted values");
    if (actual.size() < 2) throw std::invalid_argument("r2_score: need at least 2 observations");
    const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        const double d = actual[i] - mean;
        sse += e * e;
        sst += d * d;
    }
    if (sst == 0.0) throw std::invalid_argument("r2_score: actual values are constant, R² is undefined");
    return 1.0 - sse / sst;
}

void check_manifest(const Checkpoint& checkpoint, std::span<const std::string> columns) {
    const auto& manifest = checkpoint.manifest;
    const std::size_t n = std::max(manifest.size(), columns.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= manifest.size())
            throw std::invalid_argument("manifest mismatch: unexpected column '" + columns[i] + "' at position " +
                                        std::to_string(i));
        if (i >= columns.size())
            throw std::invalid_argument("manifest mismatch: missing column '" + manifest[i] + "' at position " +
                                        std::to_string(i));
        if (manifest[i] != columns[i])
            throw std::invalid_argument("manifest mismatch at position " + std::to_string(i) + ": expected '" +
                                        manifest[i] + "', found '" + columns[i] + "'");
    }
}

PreparedData prepare_for_checkpoint(const Checkpoint& checkpoint, const SeriesFrame& features) {
    check_manifest(checkpoint, features.column_names());
    PreparedData out;
    out.scaled = transform(features, checkpoint.scaler);
    const auto windows = make_windows(out.scaled, checkpoint.lookback, checkpoint.target_column);
    out.split = chronological_split(windows, SplitSpec{checkpoint.train_fraction, checkpoint.lookback});
    return out;
}

EvaluationResult evaluate(const Checkpoint& checkpoint, const WindowedDataset& test, const ScalerParams& scaler) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    const auto& target_scale = scaler.at(checkpoint.target_column);
    EvaluationResult result;
    result.dates = test.sample_dates();
    std::vector<std::size_t> idx;
    for (std::size_t begin = 0; begin < test.size(); begin += kPredictChunk) {
        const std::size_t end = std::min(test.size(), begin + kPredictChunk);
        idx.resize(end - begin);
        std::iota(idx.begin(), idx.end(), begin);
        const auto pred = predict_batch(checkpoint, to_tensor(test, idx));
        for (std::size_t i = 0; i < pred.size(); ++i) {
            result.actual.push_back(target_scale.unscale(test.targets()[begin + i]));
            result.predicted.push_back(target_scale.unscale(pred[i]));
        }
    }
    result.residuals.resize(result.actual.size());
    for (std::size_t i = 0; i < result.actual.size(); ++i) result.residuals[i] = result.actual[i] - result.predicted[i];
    result.r2 = r2_score(result.actual, result.predicted);
    return result;
}

void write_evaluation_csv(std::ostream& out, const EvaluationResult& result) {
    out << "date,actual,predicted,residual\n";
    for (std::size_t i = 0; i < result.actual.size(); ++i)
        out << result.dates[i].iso() << ',' << csv::format_double(result.actual[i]) << ','
            << csv::format_double(result.predicted[i]) << ',' << csv::format_double(result.residuals[i]) << '\n';
}

indicators::IndicatorConfig config_from_manifest(std::span<const std::string> manifest,
                                                 const indicators::IndicatorConfig& base) {
    auto has = [&](std::string_view n) { return std::find(manifest.begin(), manifest.end(), n) != manifest.end(); };
    indicators::IndicatorConfig cfg = indicators::IndicatorConfig::none();
    cfg.returns = has("log_return") || has("pct_return");
    for (const auto& name : manifest) {
        if (int w = parse_suffix(name, "sma_"); w > 0) cfg.sma_windows.push_back(w);
        if (int s = parse_suffix(name, "ema_"); s > 0) cfg.ema_spans.push_back(s);
    }
    if (has("macd") || has("macd_signal")) cfg.macd = base.macd.value_or(indicators::MacdConfig{});
    if (has("bb_upper") || has("bb_lower")) cfg.bollinger = base.bollinger.value_or(indicators::BollingerConfig{});
    cfg.range_position = has("range_position");
    cfg.temporal = has("weekday") || has("month") || has("week_of_year");
    return cfg;
}

ForecastPath forecast_recursive(const Checkpoint& checkpoint, const SeriesFrame& features, std::size_t horizon,
                                const indicators::IndicatorConfig& cfg) {
    check_manifest(checkpoint, features.column_names());
    const std::size_t lookback = checkpoint.lookback;
    if (features.rows() < lookback)
        throw std::invalid_argument("forecast_recursive: frame has " + std::to_string(features.rows()) +
                                    " rows, lookback is " + std::to_string(lookback));
    ForecastPath path;
    if (horizon == 0) return path;

    std::vector<std::string> source_columns;
    for (const auto& name : features.column_names())
        if (!is_generated_feature(name)) source_columns.push_back(name);
    if (std::find(source_columns.begin(), source_columns.end(), "close") == source_columns.end())
        throw std::invalid_argument("forecast_recursive: frame has no 'close' column");

    // Working copies grown by one synthetic row per step.
    std::vector<Date> dates = features.dates();
    std::vector<Series> columns;
    for (std::size_t c = 0; c < features.cols(); ++c) columns.push_back(features.column(c));
    const auto& target_scale = checkpoint.scaler.at(checkpoint.target_column);
    const std::size_t n_features = features.cols();

    for (std::size_t step = 0; step < horizon; ++step) {
        const std::size_t rows = dates.size();
        nn::Tensor3 window(1, lookback, n_features);
        for (std::size_t t = 0; t < lookback; ++t)
            for (std::size_t c = 0; c < n_features; ++c)
                window(0, t, c) = checkpoint.scaler.columns[c].scale(columns[c][rows - lookback + t]);
        const double scaled = predict_batch(checkpoint, window).front();
        const double close = target_scale.unscale(scaled);
        if (!std::isfinite(close)) {
            spdlog::warn("forecast_recursive: non-finite prediction at step {}, truncating path", step + 1);
            path.truncated = true;
            break;
        }
        const Date next = dates.back().next_trading_day();
        path.dates.push_back(next);
        path.close.push_back(close);
        if (step + 1 == horizon) break;

        // Extend the source columns with the synthetic bar and recompute.
        SeriesFrame source{dates};
        for (const auto& name : source_columns) source.add_column(name, columns[features.column_index(name)]);
        std::vector<Date> ext_dates = dates;
        ext_dates.push_back(next);
        SeriesFrame extended{std::move(ext_dates)};
        for (const auto& name : source_columns) {
            Series v = source.column(name);
            double value = v.back();
            if (name == "open" || name == "high" || name == "low" || name == "close") value = close;
            v.push_back(value);
            extended.add_column(name, std::move(v));
        }
        const SeriesFrame recomputed = indicators::append_features(extended, cfg);
        check_manifest(checkpoint, recomputed.column_names());
        dates.push_back(next);
        for (std::size_t c = 0; c < n_features; ++c) {
            double v = recomputed.column(c).back();
            if (is_missing(v)) v = columns[c].back();
            columns[c].push_back(v);
        }
    }
    return path;
}

void write_forecast_csv(std::ostream& out, const ForecastPath& path) {
    out << "date,projected_close\n";
    for (std::size_t i = 0; i < path.close.size(); ++i)
        out << path.dates[i].iso() << ',' << csv::format_double(path.close[i]) << '\n';
}

}  // namespace tsf
