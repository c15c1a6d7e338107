#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsf/neural_core.hpp"
#include "tsf/trainer.hpp"

namespace tsf {

struct AttributionResult {
    std::size_t lookback = 0;
    std::vector<std::string> features;
    std::vector<double> matrix;     // (lookback x features), row-major
    std::vector<double> aggregate;  // per feature, summed over timesteps
    std::string baseline = "scaled-zero";
    std::string scheme = "right-riemann";
    std::size_t steps = 0;
    double output_at_input = 0.0;
    double output_at_baseline = 0.0;
    double attribution_sum = 0.0;
    double completeness_gap = 0.0;           // |sum - (F(x) - F(baseline))|
    double relative_completeness_gap = 0.0;  // gap / |F(x) - F(baseline)|

    double at(std::size_t t, std::size_t f) const { return matrix.at(t * features.size() + f); }
};

/// Scalar function of a flattened input together with its gradient over a
/// batch of flattened inputs (row-major, one point per row).
struct Differentiable {
    std::function<double(std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double> points, std::size_t count)> gradients;
};

/// Integrated Gradients of an arbitrary differentiable function; see below.
AttributionResult integrated_gradients(const Differentiable& fn, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t lookback, std::size_t steps,
                                       std::vector<std::string> feature_names);

/// Integrated Gradients of the scalar model output along the straight path
/// from `baseline` to `x` (both lookback x n_features, row-major), using a
/// right-endpoint Riemann sum with `steps` points. Inference mode.
AttributionResult integrated_gradients(const nn::ModelParams& params, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t lookback, std::size_t steps,
                                       std::vector<std::string> feature_names = {});

AttributionResult integrated_gradients(const Checkpoint& checkpoint, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t steps);

/// Integrated Gradients against the all-zero scaled window.
AttributionResult integrated_gradients(const Checkpoint& checkpoint, std::span<const double> x, std::size_t steps = 256);

struct FeatureRank {
    std::string feature;
    std::size_t index = 0;  // manifest position
    double mean_abs = 0.0;
};

/// Mean of |aggregate| per feature across results, sorted descending; ties
/// keep manifest order. Throws std::invalid_argument on an empty list or
/// differing manifests.
std::vector<FeatureRank> aggregate_attribution(std::span<const AttributionResult> results);

/// Rows are timesteps (oldest first), columns are features.
void write_attribution_csv(std::ostream& out, const AttributionResult& result);

}  // namespace tsf
