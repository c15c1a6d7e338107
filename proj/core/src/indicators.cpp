#include "tsf/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "tsf/csv.hpp"
#include "tsf/timeseries_store.hpp"

namespace tsf::indicators {

namespace {

void require_positive(int value, const char* what) {
    if (value < 1) throw std::invalid_argument(std::string(what) + " must be >= 1, got " + std::to_string(value));
}

bool is_ohlcv(std::string_view name) {
    return name == "open" || name == "high" || name == "low" || name == "close" || name == "volume";
}

}  // namespace

void IndicatorConfig::validate() const {
    for (int w : sma_windows) require_positive(w, "sma window");
    for (int s : ema_spans) require_positive(s, "ema span");
    if (macd) {
        require_positive(macd->fast, "macd fast span");
        require_positive(macd->slow, "macd slow span");
        require_positive(macd->signal, "macd signal span");
        if (macd->fast >= macd->slow) throw std::invalid_argument("macd fast span must be < slow span");
    }
    if (bollinger) {
        if (bollinger->window < 2) throw std::invalid_argument("bollinger window must be >= 2");
        if (!(bollinger->num_std >= 0.0)) throw std::invalid_argument("bollinger num_std must be >= 0");
    }
}

IndicatorConfig IndicatorConfig::none() {
    IndicatorConfig cfg;
    cfg.returns = false;
    cfg.sma_windows.clear();
    cfg.ema_spans.clear();
    cfg.macd.reset();
    cfg.bollinger.reset();
    cfg.range_position = false;
    cfg.temporal = false;
    return cfg;
}

Series log_return(std::span<const double> close, std::span<const Date> dates) {
    Series out(close.size(), kMissing);
    for (std::size_t t = 1; t < close.size(); ++t) {
        const double prev = close[t - 1];
        const double cur = close[t];
        if (is_missing(prev) || is_missing(cur)) continue;
        if (prev <= 0.0 || cur <= 0.0) {
            const std::string where = t < dates.size() ? dates[t].iso() : "index " + std::to_string(t);
            throw std::invalid_argument("log_return: non-positive price at " + where);
        }
        out[t] = std::log(cur / prev);
    }
    return out;
}

Series pct_return(std::span<const double> close) {
    Series out(close.size(), kMissing);
    for (std::size_t t = 1; t < close.size(); ++t) {
        const double prev = close[t - 1];
        const double cur = close[t];
        if (is_missing(prev) || is_missing(cur)) continue;
        if (prev == 0.0) {
            spdlog::warn("pct_return: zero price at index {}, return left missing", t - 1);
            continue;
        }
        out[t] = cur / prev - 1.0;
    }
    return out;
}

Series sma(std::span<const double> x, int window) {
    require_positive(window, "sma window");
    const auto w = static_cast<std::size_t>(window);
    Series out(x.size(), kMissing);
    // Each window is summed directly so results do not depend on where the
    // series starts.
    for (std::size_t t = w - 1; t < x.size(); ++t) {
        double sum = 0.0;
        bool complete = true;
        for (std::size_t k = t + 1 - w; k <= t; ++k) {
            if (is_missing(x[k])) {
                complete = false;
                break;
            }
            sum += x[k];
        }
        if (complete) out[t] = sum / static_cast<double>(w);
    }
    return out;
}

Series ema(std::span<const double> x, int span, int min_periods) {
    require_positive(span, "ema span");
    const double alpha = 2.0 / (static_cast<double>(span) + 1.0);
    Series out(x.size(), kMissing);
    double state = kMissing;
    int seen = 0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (is_missing(x[t])) continue;
        state = is_missing(state) ? x[t] : alpha * x[t] + (1.0 - alpha) * state;
        ++seen;
        if (seen >= min_periods) out[t] = state;
    }
    return out;
}

Series ema(std::span<const double> x, int span) { return ema(x, span, 0); }

MacdLines macd(std::span<const double> close, const MacdConfig& cfg) {
    if (cfg.fast >= cfg.slow) throw std::invalid_argument("macd fast span must be < slow span");
    const Series fast = ema(close, cfg.fast, cfg.fast);
    const Series slow = ema(close, cfg.slow, cfg.slow);
    MacdLines lines;
    lines.macd.resize(close.size(), kMissing);
    for (std::size_t t = 0; t < close.size(); ++t) {
        if (!is_missing(fast[t]) && !is_missing(slow[t])) lines.macd[t] = fast[t] - slow[t];
    }
    lines.signal = ema(lines.macd, cfg.signal, cfg.signal);
    return lines;
}

BollingerBands bollinger(std::span<const double> close, int window, double num_std) {
    if (window < 2) throw std::invalid_argument("bollinger window must be >= 2");
    const auto w = static_cast<std::size_t>(window);
    BollingerBands bands;
    bands.middle = sma(close, window);
    bands.upper.assign(close.size(), kMissing);
    bands.lower.assign(close.size(), kMissing);
    for (std::size_t t = w - 1; t < close.size(); ++t) {
        const double mid = bands.middle[t];
        if (is_missing(mid)) continue;
        // Two-pass variance keeps constant windows at exactly zero.
        double ss = 0.0;
        for (std::size_t k = t + 1 - w; k <= t; ++k) {
            const double d = close[k] - mid;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(w));
        bands.upper[t] = mid + num_std * sd;
        bands.lower[t] = mid - num_std * sd;
    }
    return bands;
}

TemporalFeatures temporal_features(std::span<const Date> dates) {
    TemporalFeatures f;
    f.weekday.reserve(dates.size());
    f.month.reserve(dates.size());
    f.week_of_year.reserve(dates.size());
    for (const auto& d : dates) {
        f.weekday.push_back(static_cast<double>(d.weekday()));
        f.month.push_back(static_cast<double>(d.month()));
        f.week_of_year.push_back(static_cast<double>(d.iso_week().week));
    }
    return f;
}

Series range_position(std::span<const double> high, std::span<const double> low, std::span<const double> close) {
    if (high.size() != low.size() || high.size() != close.size())
        throw std::invalid_argument("range_position: series lengths differ");
    Series out(close.size(), kMissing);
    for (std::size_t t = 0; t < close.size(); ++t) {
        const double span = high[t] - low[t];
        if (is_missing(span) || is_missing(close[t]) || span == 0.0) continue;
        out[t] = (close[t] - low[t]) / span;
    }
    return out;
}

CorrelationMatrix pearson_matrix(const SeriesFrame& frame, std::span<const std::string> columns) {
    if (columns.size() < 2) throw std::invalid_argument("pearson_matrix needs at least 2 columns");
    const std::size_t n = columns.size();
    std::vector<const Series*> cols;
    for (const auto& c : columns) cols.push_back(&frame.column(c));

    CorrelationMatrix m;
    m.labels.assign(columns.begin(), columns.end());
    m.values.assign(n * n, kMissing);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const Series& x = *cols[i];
            const Series& y = *cols[j];
            double sx = 0.0, sy = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < x.size(); ++r) {
                if (is_missing(x[r]) || is_missing(y[r])) continue;
                sx += x[r];
                sy += y[r];
                ++count;
            }
            if (count < 2) {
                spdlog::warn("pearson_matrix: fewer than 2 overlapping observations for ({}, {})", columns[i],
                             columns[j]);
                continue;
            }
            const double mx = sx / static_cast<double>(count);
            const double my = sy / static_cast<double>(count);
            double sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (std::size_t r = 0; r < x.size(); ++r) {
                if (is_missing(x[r]) || is_missing(y[r])) continue;
                const double dx = x[r] - mx;
                const double dy = y[r] - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
            if (sxx == 0.0 || syy == 0.0) continue;
            const double r = i == j ? 1.0 : std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
            m.values[i * n + j] = r;
            m.values[j * n + i] = r;
        }
    }
    return m;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
    out << "label";
    for (const auto& l : m.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.labels[i];
        for (std::size_t j = 0; j < m.size(); ++j) out << ',' << csv::format_double(m.at(i, j));
        out << '\n';
    }
}

std::vector<std::string> feature_manifest(const IndicatorConfig& cfg, std::span<const std::string> source_columns) {
    std::vector<std::string> names;
    for (auto c : {"open", "high", "low", "close", "volume"}) {
        if (std::find(source_columns.begin(), source_columns.end(), c) != source_columns.end()) names.emplace_back(c);
    }
    if (cfg.returns) {
        names.emplace_back("log_return");
        names.emplace_back("pct_return");
    }
    for (int w : cfg.sma_windows) names.push_back("sma_" + std::to_string(w));
    for (int s : cfg.ema_spans) names.push_back("ema_" + std::to_string(s));
    if (cfg.macd) {
        names.emplace_back("macd");
        names.emplace_back("macd_signal");
    }
    if (cfg.bollinger) {
        names.emplace_back("bb_upper");
        names.emplace_back("bb_lower");
    }
    if (cfg.range_position) names.emplace_back("range_position");
    if (cfg.temporal) {
        names.emplace_back("weekday");
        names.emplace_back("month");
        names.emplace_back("week_of_year");
    }
    for (const auto& c : source_columns) {
        if (!is_ohlcv(c) && std::find(names.begin(), names.end(), c) == names.end()) names.push_back(c);
    }
    return names;
}

SeriesFrame append_features(const SeriesFrame& source, const IndicatorConfig& cfg) {
    cfg.validate();
    const bool needs_close = cfg.returns || !cfg.sma_windows.empty() || !cfg.ema_spans.empty() || cfg.macd ||
                             cfg.bollinger || cfg.range_position;
    if (needs_close && !source.has_column("close"))
        throw std::invalid_argument("build_feature_frame: missing required source column 'close'");
    if (cfg.range_position) {
        for (auto c : {"high", "low"})
            if (!source.has_column(c))
                throw std::invalid_argument(std::string("build_feature_frame: missing required source column '") + c +
                                            "'");
    }

    SeriesFrame all = source;
    if (cfg.returns) {
        const auto& close = source.column("close");
        all.set_column("log_return", log_return(close, source.dates()));
        all.set_column("pct_return", pct_return(close));
    }
    for (int w : cfg.sma_windows) all.set_column("sma_" + std::to_string(w), sma(source.column("close"), w));
    for (int s : cfg.ema_spans) all.set_column("ema_" + std::to_string(s), ema(source.column("close"), s));
    if (cfg.macd) {
        auto lines = macd(source.column("close"), *cfg.macd);
        all.set_column("macd", std::move(lines.macd));
        all.set_column("macd_signal", std::move(lines.signal));
    }
    if (cfg.bollinger) {
        auto bands = bollinger(source.column("close"), cfg.bollinger->window, cfg.bollinger->num_std);
        all.set_column("bb_upper", std::move(bands.upper));
        all.set_column("bb_lower", std::move(bands.lower));
    }
    if (cfg.range_position)
        all.set_column("range_position",
                       range_position(source.column("high"), source.column("low"), source.column("close")));
    if (cfg.temporal) {
        auto t = temporal_features(source.dates());
        all.set_column("weekday", std::move(t.weekday));
        all.set_column("month", std::move(t.month));
        all.set_column("week_of_year", std::move(t.week_of_year));
    }
    return all.select(feature_manifest(cfg, source.column_names()));
}

FeatureFrame build_feature_frame(const SeriesFrame& source, const IndicatorConfig& cfg) {
    const SeriesFrame all = append_features(source, cfg);

    FeatureFrame result;
    std::vector<std::string> order;
    for (const auto& name : all.column_names()) {
        const auto& values = all.column(name);
        const bool observed = std::any_of(values.begin(), values.end(), [](double v) { return !is_missing(v); });
        if (!observed && source.has_column(name) && !is_ohlcv(name)) {
            spdlog::warn("build_feature_frame: dropping column '{}' with no observed values", name);
            result.dropped_columns.push_back(name);
            continue;
        }
        order.push_back(name);
    }
    SeriesFrame ordered = all.select(order);

    std::size_t first_complete = 0;
    for (; first_complete < ordered.rows(); ++first_complete) {
        bool complete = true;
        for (std::size_t c = 0; c < ordered.cols() && complete; ++c)
            complete = !is_missing(ordered.column(c)[first_complete]);
        if (complete) break;
    }
    if (first_complete == ordered.rows() && ordered.cols() > 0)
        throw std::invalid_argument("build_feature_frame: no complete row after warm-up");

    result.warmup_trimmed = first_complete;
    result.frame = forward_fill(ordered.slice_rows(first_complete, ordered.rows()));
    return result;
}

}  // namespace tsf::indicators
