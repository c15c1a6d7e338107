#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "synthetic.hpp"
#include "tsf/attribution.hpp"

using namespace tsf;

namespace {

constexpr std::size_t kL = 6, kF = 3;

nn::ModelParams model(std::uint64_t seed) { return nn::init_params(nn::Architecture{kF, 6, 5, 0.2}, nn::RngSeed{seed}); }

std::vector<double> window(std::uint64_t seed) {
    nn::Rng rng(seed);
    std::vector<double> w(kL * kF);
    for (auto& v : w) v = rng.uniform(0.0, 1.0);
    return w;
}

}  // namespace

TEST(IntegratedGradients, InputEqualsBaselineGivesZero) {
    const auto x = window(1);
    const auto r = integrated_gradients(model(1), x, x, kL, 32);
    for (double v : r.matrix) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.completeness_gap, 0.0);
}

TEST(IntegratedGradients, AggregateIsColumnSum) {
    const auto r = integrated_gradients(model(2), window(2), std::vector<double>(kL * kF, 0.0), kL, 64);
    for (std::size_t f = 0; f < kF; ++f) {
        double s = 0.0;
        for (std::size_t t = 0; t < kL; ++t) s += r.at(t, f);
        EXPECT_EQ(r.aggregate[f], s);
    }
    EXPECT_EQ(r.baseline, "scaled-zero");
    EXPECT_EQ(r.scheme, "right-riemann");
}

TEST(IntegratedGradients, CompletenessImprovesWithSteps) {
    const auto p = model(3);
    const auto x = window(3);
    const std::vector<double> zero(kL * kF, 0.0);
    double prev = integrated_gradients(p, x, zero, kL, 64).completeness_gap;
    for (std::size_t steps : {128u, 256u}) {
        const double gap = integrated_gradients(p, x, zero, kL, steps).completeness_gap;
        EXPECT_LE(gap, prev * 1.1);
        prev = gap;
    }
    EXPECT_LE(integrated_gradients(p, x, zero, kL, 300).relative_completeness_gap, 1e-2);
}

TEST(IntegratedGradients, LinearFunctionIsExact) {
    const std::size_t n = kL * kF;
    std::vector<double> w(n);
    nn::Rng rng(4);
    for (auto& v : w) v = rng.uniform(-1, 1);
    Differentiable fn;
    fn.value = [&](std::span<const double> x) {
        double s = -0.5;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i];
        return s;
    };
    fn.gradients = [&](std::span<const double>, std::size_t count) {
        std::vector<double> g;
        for (std::size_t k = 0; k < count; ++k) g.insert(g.end(), w.begin(), w.end());
        return g;
    };
    const auto x = window(5);
    for (std::size_t steps : {1u, 3u, 200u}) {
        const auto r = integrated_gradients(fn, x, std::vector<double>(n, 0.0), kL, steps, {});
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.matrix[i], w[i] * x[i], 1e-12);
        EXPECT_LE(r.completeness_gap, 1e-12);
    }
}

TEST(IntegratedGradients, DisconnectedFeatureGetsZero) {
    auto p = model(6);
    for (std::size_t r = 0; r < 4 * p.layer1.hidden_size; ++r) p.layer1.W[r * kF + 1] = 0.0;
    const auto res = integrated_gradients(p, window(6), std::vector<double>(kL * kF, 0.0), kL, 50, {"a", "b", "c"});
    for (std::size_t t = 0; t < kL; ++t) EXPECT_EQ(res.at(t, 1), 0.0);
}

TEST(IntegratedGradients, WiredFeatureRanksFirst) {
    auto p = model(7);
    for (std::size_t r = 0; r < 4 * p.layer1.hidden_size; ++r) {
        p.layer1.W[r * kF + 0] = 0.0;
        p.layer1.W[r * kF + 1] = 0.0;
    }
    const auto res = integrated_gradients(p, window(7), std::vector<double>(kL * kF, 0.0), kL, 50, {"a", "b", "c"});
    const AttributionResult one[] = {res};
    const auto rank = aggregate_attribution(one);
    EXPECT_EQ(rank.front().feature, "c");
    EXPECT_EQ(rank[1].feature, "a");  // ties keep manifest order
}

TEST(IntegratedGradients, Errors) {
    const auto p = model(8);
    const auto x = window(8);
    EXPECT_THROW(integrated_gradients(p, x, x, kL, 0), std::invalid_argument);
    EXPECT_THROW(integrated_gradients(p, x, std::vector<double>(3), kL, 10), std::invalid_argument);
    EXPECT_THROW(integrated_gradients(p, x, x, kL, 10, {"only-one"}), std::invalid_argument);
}

TEST(Aggregate, MeanAbsAndManifestCheck) {
    AttributionResult a;
    a.features = {"x", "y"};
    a.aggregate = {1.0, -3.0};
    AttributionResult b = a;
    b.aggregate = {-3.0, 1.0};
    const AttributionResult both[] = {a, b};
    const auto r = aggregate_attribution(both);
    EXPECT_EQ(r[0].feature, "x");
    EXPECT_EQ(r[0].mean_abs, 2.0);
    EXPECT_EQ(r[1].mean_abs, 2.0);
    const AttributionResult same[] = {a, a};
    const AttributionResult single[] = {a};
    EXPECT_EQ(aggregate_attribution(same)[0].feature, aggregate_attribution(single)[0].feature);
    b.features = {"x", "z"};
    const AttributionResult mixed[] = {a, b};
    EXPECT_THROW(aggregate_attribution(mixed), std::invalid_argument);
    EXPECT_THROW(aggregate_attribution(std::span<const AttributionResult>{}), std::invalid_argument);
}

TEST(Attribution, CsvLayout) {
    const auto r = integrated_gradients(model(9), window(9), std::vector<double>(kL * kF, 0.0), kL, 8, {"a", "b", "c"});
    std::ostringstream s;
    write_attribution_csv(s, r);
    std::istringstream in(s.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "timestep,a,b,c");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, kL);
}
