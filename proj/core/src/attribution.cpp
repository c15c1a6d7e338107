#include "tsf/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "tsf/csv.hpp"

namespace tsf {

namespace {

constexpr std::size_t kStepChunk = 64;

}  // namespace

AttributionResult integrated_gradients(const Differentiable& fn, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t lookback, std::size_t steps,
                                       std::vector<std::string> feature_names) {
    if (steps < 1) throw std::invalid_argument("integrated_gradients: steps must be >= 1");
    if (lookback < 1) throw std::invalid_argument("integrated_gradients: lookback must be >= 1");
    if (x.size() != baseline.size()) throw std::invalid_argument("integrated_gradients: input and baseline differ in size");
    if (x.size() % lookback != 0) throw std::invalid_argument("integrated_gradients: input is not lookback x features");
    const std::size_t F = x.size() / lookback;
    if (feature_names.empty())
        for (std::size_t f = 0; f < F; ++f) feature_names.push_back("f" + std::to_string(f));
    if (feature_names.size() != F) throw std::invalid_argument("integrated_gradients: feature name count mismatch");

    const std::size_t n = x.size();
    std::vector<double> grad_sum(n, 0.0);
    std::vector<double> points;
    for (std::size_t first = 1; first <= steps; first += kStepChunk) {
        const std::size_t last = std::min(steps, first + kStepChunk - 1);
        const std::size_t count = last - first + 1;
        points.resize(count * n);
        for (std::size_t k = 0; k < count; ++k) {
            const double alpha = static_cast<double>(first + k) / static_cast<double>(steps);
            double* dst = &points[k * n];
            for (std::size_t i = 0; i < n; ++i) dst[i] = baseline[i] + alpha * (x[i] - baseline[i]);
        }
        const auto grads = fn.gradients(points, count);
        if (grads.size() != count * n) throw std::invalid_argument("integrated_gradients: gradient size mismatch");
        for (std::size_t k = 0; k < count; ++k)
            for (std::size_t i = 0; i < n; ++i) grad_sum[i] += grads[k * n + i];
    }

    AttributionResult r;
    r.lookback = lookback;
    r.features = std::move(feature_names);
    r.steps = steps;
    r.matrix.resize(n);
    r.aggregate.assign(F, 0.0);
    for (std::size_t i = 0; i < n; ++i) r.matrix[i] = (x[i] - baseline[i]) * grad_sum[i] / static_cast<double>(steps);
    for (std::size_t t = 0; t < lookback; ++t)
        for (std::size_t f = 0; f < F; ++f) r.aggregate[f] += r.matrix[t * F + f];
    for (double a : r.aggregate) r.attribution_sum += a;

    r.output_at_input = fn.value(x);
    r.output_at_baseline = fn.value(baseline);
    const double delta = r.output_at_input - r.output_at_baseline;
    r.completeness_gap = std::abs(r.attribution_sum - delta);
    r.relative_completeness_gap = delta != 0.0 ? r.completeness_gap / std::abs(delta)
                                               : (r.completeness_gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return r;
}

AttributionResult integrated_gradients(const nn::ModelParams& params, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t lookback, std::size_t steps,
                                       std::vector<std::string> feature_names) {
    const std::size_t F = params.layer1.input_size;
    if (lookback < 1) throw std::invalid_argument("integrated_gradients: lookback must be >= 1");
    if (x.size() != lookback * F || baseline.size() != lookback * F)
        throw std::invalid_argument("integrated_gradients: input and baseline must hold lookback x " +
                                    std::to_string(F) + " values");
    Differentiable fn;
    fn.value = [&](std::span<const double> window) {
        nn::Tensor3 t(1, lookback, F);
        std::copy(window.begin(), window.end(), t.data.begin());
        return nn::predict(params, t).front();
    };
    fn.gradients = [&](std::span<const double> points, std::size_t count) {
        nn::Tensor3 t(count, lookback, F);
        std::copy(points.begin(), points.end(), t.data.begin());
        const auto fwd = nn::model_forward(params, t, false);
        const std::vector<double> ones(count, 1.0);
        return nn::model_backward(params, fwd.cache, ones, true).grad_x.data;
    };
    return integrated_gradients(fn, x, baseline, lookback, steps, std::move(feature_names));
}

AttributionResult integrated_gradients(const Checkpoint& checkpoint, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t steps) {
    auto r = integrated_gradients(checkpoint.params, x, baseline, checkpoint.lookback, steps, checkpoint.manifest);
    r.baseline = "custom";
    return r;
}

AttributionResult integrated_gradients(const Checkpoint& checkpoint, std::span<const double> x, std::size_t steps) {
    const std::vector<double> zeros(x.size(), 0.0);
    return integrated_gradients(checkpoint.params, x, zeros, checkpoint.lookback, steps, checkpoint.manifest);
}

std::vector<FeatureRank> aggregate_attribution(std::span<const AttributionResult> results) {
    if (results.empty()) throw std::invalid_argument("aggregate_attribution: no results");
    const auto& features = results.front().features;
    for (const auto& r : results) {
        if (r.features != features) throw std::invalid_argument("aggregate_attribution: manifests differ");
        if (r.aggregate.size() != features.size())
            throw std::invalid_argument("aggregate_attribution: aggregate length mismatch");
    }
    std::vector<FeatureRank> ranks;
    for (std::size_t f = 0; f < features.size(); ++f) {
        double sum = 0.0;
        for (const auto& r : results) sum += std::abs(r.aggregate[f]);
        ranks.push_back({features[f], f, sum / static_cast<double>(results.size())});
    }
    std::stable_sort(ranks.begin(), ranks.end(), [](const auto& a, const auto& b) { return a.mean_abs > b.mean_abs; });
    return ranks;
}

void write_attribution_csv(std::ostream& out, const AttributionResult& result) {
    out << "timestep";
    for (const auto& f : result.features) out << ',' << f;
    out << '\n';
    for (std::size_t t = 0; t < result.lookback; ++t) {
        out << t;
        for (std::size_t f = 0; f < result.features.size(); ++f) out << ',' << csv::format_double(result.at(t, f));
        out << '\n';
    }
}

}  // namespace tsf
