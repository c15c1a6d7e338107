#include <benchmark/benchmark.h>

#include "tsf/neural_core.hpp"

using namespace tsf::nn;

namespace {

Tensor3 input(std::size_t batch, std::size_t steps, std::size_t features) {
    Rng rng(1);
    Tensor3 x(batch, steps, features);
    for (auto& v : x.data) v = rng.uniform();
    return x;
}

void BM_ModelForward(benchmark::State& state) {
    const auto hidden = static_cast<std::size_t>(state.range(0));
    const auto params = init_params(Architecture{19, hidden, hidden, 0.2}, RngSeed{1});
    const auto x = input(32, 60, 19);
    for (auto _ : state) benchmark::DoNotOptimize(model_forward(params, x, true, 7));
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_ModelForward)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
    const auto hidden = static_cast<std::size_t>(state.range(0));
    auto params = init_params(Architecture{19, hidden, hidden, 0.2}, RngSeed{1});
    auto adam = AdamState::fresh(params);
    const auto x = input(32, 60, 19);
    const std::vector<double> y(32, 0.5);
    for (auto _ : state) {
        const auto fwd = model_forward(params, x, true, adam.step);
        const auto loss = mse_loss(fwd.pred, y);
        const auto grads = model_backward(params, fwd.cache, loss.grad).grad;
        adam_step(params, grads, adam);
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_InputGradients(benchmark::State& state) {
    const auto params = init_params(Architecture{19, 64, 64, 0.2}, RngSeed{1});
    const auto x = input(64, 60, 19);
    const std::vector<double> ones(64, 1.0);
    for (auto _ : state) {
        const auto fwd = model_forward(params, x, false);
        benchmark::DoNotOptimize(model_backward(params, fwd.cache, ones, true));
    }
}
BENCHMARK(BM_InputGradients)->Unit(benchmark::kMillisecond);

}  // namespace
