#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "tsf/neural_core.hpp"

using namespace tsf;
using namespace tsf::nn;

TEST(Rng, DeterministicAndInRange) {
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    Rng c(6);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(c.below(7), 7u);
    EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
    EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
}

TEST(Init, ShapesBiasAndDeterminism) {
    const Architecture arch{5, 6, 7, 0.2};
    const auto p = init_params(arch, RngSeed{3});
    EXPECT_EQ(p.layer1.W.size(), 4u * 6 * 5);
    EXPECT_EQ(p.layer1.U.size(), 4u * 6 * 6);
    EXPECT_EQ(p.layer2.W.size(), 4u * 7 * 6);
    EXPECT_EQ(p.head.w.size(), 7u);
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_EQ(p.layer1.b[kForgetGate * 6 + j], 1.0);
        EXPECT_EQ(p.layer1.b[kInputGate * 6 + j], 0.0);
    }
    EXPECT_EQ(p, init_params(arch, RngSeed{3}));
    EXPECT_NE(p, init_params(arch, RngSeed{4}));
    EXPECT_EQ(parameter_count(p), 4u * 6 * (5 + 6 + 1) + 4u * 7 * (6 + 7 + 1) + 7 + 1);
    const double limit = std::sqrt(6.0 / (5 + 24));
    for (double w : p.layer1.W) EXPECT_LE(std::abs(w), limit);
}

TEST(Forward, ZeroParamsPredictZero) {
    const auto p = ModelParams::zeros(Architecture{3, 4, 4, 0.2});
    const auto pred = predict(p, synth::random_tensor(3, 5, 3, 1));
    for (double v : pred) EXPECT_EQ(v, 0.0);
}

TEST(Forward, MatchesScalarReference) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto p = init_params(Architecture{4, 9, 5, 0.2}, RngSeed{s});
        const auto x = synth::random_tensor(3, 11, 4, 100 + s, 3.0);
        const auto got = predict(p, x);
        const auto want = oracle::model_predict(p, x);
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(Forward, StateBoundsHold) {
    const auto p = init_params(Architecture{3, 8, 8, 0.0}, RngSeed{1});
    const auto x = synth::random_tensor(2, 40, 3, 2, 50.0);
    const auto f = lstm_forward(p.layer1, x);
    for (double v : f.cache.h.data) EXPECT_LE(std::abs(v), 1.0);
    for (double v : f.cache.tanh_c.data) EXPECT_LE(std::abs(v), 1.0);
}

TEST(Forward, BatchIndependenceAndPermutation) {
    const auto p = init_params(Architecture{2, 5, 5, 0.2}, RngSeed{9});
    const auto x = synth::random_tensor(3, 6, 2, 10);
    Tensor3 swapped = x;
    const std::size_t stride = 6 * 2;
    std::copy(x.data.begin(), x.data.begin() + stride, swapped.data.begin() + 2 * stride);
    std::copy(x.data.begin() + 2 * stride, x.data.end(), swapped.data.begin());
    const auto a = predict(p, x);
    const auto b = predict(p, swapped);
    EXPECT_EQ(a[0], b[2]);
    EXPECT_EQ(a[1], b[1]);
    EXPECT_EQ(a[2], b[0]);
    Tensor3 single(1, 6, 2);
    std::copy(x.data.begin() + stride, x.data.begin() + 2 * stride, single.data.begin());
    EXPECT_EQ(predict(p, single)[0], a[1]);
}

TEST(Forward, ShapeMismatch) {
    const auto p = init_params(Architecture{3, 4, 4, 0.2}, RngSeed{1});
    EXPECT_THROW(predict(p, Tensor3(1, 5, 2)), std::invalid_argument);
}

TEST(Dropout, InferenceIdentityAndTrainingMask) {
    const std::vector<double> x(1000, 1.0);
    const auto id = dropout(x, 0.5, false, 1);
    EXPECT_EQ(id.values, x);
    EXPECT_TRUE(id.mask.empty());
    const auto d = dropout(x, 0.25, true, 7);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_TRUE(d.values[i] == 0.0 || std::abs(d.values[i] - 1.0 / 0.75) < 1e-15);
        zeros += d.values[i] == 0.0;
    }
    EXPECT_GT(zeros, 180u);
    EXPECT_LT(zeros, 320u);
    EXPECT_EQ(dropout(x, 0.25, true, 7).values, d.values);
}

TEST(Dropout, InferenceForwardIsRepeatable) {
    const auto p = init_params(Architecture{3, 6, 6, 0.5}, RngSeed{4});
    const auto x = synth::random_tensor(2, 5, 3, 5);
    EXPECT_EQ(model_forward(p, x, false, 1).pred, model_forward(p, x, false, 2).pred);
    EXPECT_NE(model_forward(p, x, true, 1).pred, model_forward(p, x, true, 2).pred);
}

TEST(Loss, MseAndGradient) {
    const std::vector<double> p{1, 2, 3}, t{1, 1, 5};
    const auto l = mse_loss(p, t);
    EXPECT_DOUBLE_EQ(l.loss, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(l.grad[1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(l.grad[2], -4.0 / 3.0);
    EXPECT_THROW(mse_loss(p, std::vector<double>{1}), std::invalid_argument);
}

TEST(Adam, FirstStepHandValue) {
    std::vector<double> theta{0.0}, m{0.0}, v{0.0};
    const std::vector<double> g{1.0};
    adam_update(theta, g, m, v, AdamConfig{}, 1);
    EXPECT_NEAR(theta[0], -0.001 / (1.0 + 1e-8), 1e-18);
}

TEST(Adam, ZeroGradientLeavesParameters) {
    auto p = init_params(Architecture{2, 3, 3, 0.2}, RngSeed{1});
    const auto before = p;
    auto state = AdamState::fresh(p);
    adam_step(p, ModelParams::zeros(p.architecture()), state);
    EXPECT_EQ(p, before);
    EXPECT_EQ(state.step, 1u);
}

TEST(Adam, MatchesScalarRecurrence) {
    const AdamConfig cfg;
    std::vector<double> theta{0.5}, m{0.0}, v{0.0};
    double rt = 0.5, rm = 0.0, rv = 0.0;
    for (std::uint64_t t = 1; t <= 2; ++t) {
        const double g = 0.3;
        adam_update(theta, std::vector<double>{g}, m, v, cfg, t);
        rm = cfg.beta1 * rm + (1 - cfg.beta1) * g;
        rv = cfg.beta2 * rv + (1 - cfg.beta2) * g * g;
        const double mh = rm / (1 - std::pow(cfg.beta1, static_cast<double>(t)));
        const double vh = rv / (1 - std::pow(cfg.beta2, static_cast<double>(t)));
        rt -= cfg.lr * mh / (std::sqrt(vh) + cfg.epsilon);
    }
    EXPECT_NEAR(theta[0], rt, 1e-15);
}

TEST(Adam, NonFiniteGradientNamesBlock) {
    auto p = init_params(Architecture{2, 3, 3, 0.2}, RngSeed{1});
    const auto before = p;
    auto state = AdamState::fresh(p);
    auto g = ModelParams::zeros(p.architecture());
    g.layer2.U[4] = std::nan("");
    try {
        adam_step(p, g, state);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("layer2.U"), std::string::npos);
    }
    EXPECT_EQ(p, before);
}

TEST(Clip, GlobalNorm) {
    auto g = ModelParams::zeros(Architecture{1, 1, 1, 0.0});
    g.head.w[0] = 3.0;
    g.head.b[0] = 4.0;
    EXPECT_DOUBLE_EQ(clip_global_norm(g, 1.0), 5.0);
    EXPECT_NEAR(g.head.w[0], 0.6, 1e-15);
    EXPECT_NEAR(g.head.b[0], 0.8, 1e-15);
}

TEST(GradientCheck, FullModelTrainingMode) {
    const auto p = init_params(Architecture{3, 4, 4, 0.2}, RngSeed{17});
    const auto x = synth::random_tensor(2, 5, 3, 18);
    const std::vector<double> y{0.1, 0.9};
    const auto r = gradient_check(p, x, y, 19);
    EXPECT_LE(r.max_relative_error, 1e-4) << r.worst_block;
    EXPECT_EQ(r.per_block.size(), 8u);
    EXPECT_EQ(gradient_check(p, x, y, 19).max_relative_error, r.max_relative_error);
}

TEST(GradientCheck, DenseHeadIsNearExact) {
    const auto p = init_params(Architecture{2, 3, 3, 0.0}, RngSeed{5});
    const auto r = gradient_check(p, synth::random_tensor(2, 4, 2, 6), std::vector<double>{0.2, -0.4}, 0, false);
    for (const auto& [name, err] : r.per_block)
        if (name.starts_with("head")) EXPECT_LE(err, 1e-6) << name;
}

TEST(Backward, InputGradientMatchesFiniteDifference) {
    const auto p = init_params(Architecture{2, 3, 4, 0.0}, RngSeed{8});
    auto x = synth::random_tensor(1, 4, 2, 9);
    const auto fwd = model_forward(p, x, false);
    const auto back = model_backward(p, fwd.cache, std::vector<double>{1.0}, true);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double saved = x.data[i];
        x.data[i] = saved + 1e-6;
        const double up = predict(p, x)[0];
        x.data[i] = saved - 1e-6;
        const double down = predict(p, x)[0];
        x.data[i] = saved;
        EXPECT_NEAR(back.grad_x.data[i], (up - down) / 2e-6, 1e-8);
    }
}
