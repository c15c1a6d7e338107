#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsf::nn {

/// Seed for every random draw of a run (initialization, dropout, shuffling).
struct RngSeed {
    std::uint64_t value = 0;
};

/// splitmix64 finalizer; derives independent stream seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Portable deterministic generator. The engine output is fixed by the
/// standard; the conversions below avoid implementation-defined distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller, one draw per call).
    double normal();
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// Dense (batch x steps x features) tensor, row-major.
struct Tensor3 {
    std::size_t batch = 0;
    std::size_t steps = 0;
    std::size_t features = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t b, std::size_t t, std::size_t f, double fill = 0.0)
        : batch(b), steps(t), features(f), data(b * t * f, fill) {}

    double& operator()(std::size_t b, std::size_t t, std::size_t f) { return data[(b * steps + t) * features + f]; }
    double operator()(std::size_t b, std::size_t t, std::size_t f) const {
        return data[(b * steps + t) * features + f];
    }
    std::span<double> row(std::size_t b, std::size_t t) {
        return std::span<double>(data).subspan((b * steps + t) * features, features);
    }
    std::span<const double> row(std::size_t b, std::size_t t) const {
        return std::span<const double>(data).subspan((b * steps + t) * features, features);
    }
};

/// Gate blocks are stacked in the order [input, forget, cell candidate, output].
enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };

struct LstmLayerParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    std::vector<double> W;  // (4H x input), row-major
    std::vector<double> U;  // (4H x H), row-major
    std::vector<double> b;  // 4H

    static LstmLayerParams zeros(std::size_t input_size, std::size_t hidden_size);
    /// Throws std::invalid_argument on inconsistent shapes or non-finite values.
    void validate() const;
    bool operator==(const LstmLayerParams&) const = default;
};

struct DenseParams {
    std::vector<double> w;       // 1 x hidden
    std::vector<double> b{0.0};  // 1

    bool operator==(const DenseParams&) const = default;
};

struct Architecture {
    std::size_t input_size = 0;
    std::size_t hidden1 = 64;
    std::size_t hidden2 = 64;
    double dropout_rate = 0.2;

    bool operator==(const Architecture&) const = default;
};

/// Two stacked LSTM layers (the first returns its full sequence, the second
/// only its last state), dropout after each, and a one-unit dense head.
struct ModelParams {
    LstmLayerParams layer1;
    LstmLayerParams layer2;
    DenseParams head;
    double dropout_rate = 0.2;

    static ModelParams zeros(const Architecture& arch);
    Architecture architecture() const;
    void validate() const;
    bool operator==(const ModelParams&) const = default;
};

struct ParamBlock {
    std::string_view name;
    std::span<double> values;
};

struct ConstParamBlock {
    std::string_view name;
    std::span<const double> values;
};

/// Named views in fixed order: layer1.W, layer1.U, layer1.b, layer2.W,
/// layer2.U, layer2.b, head.w, head.b.
std::vector<ParamBlock> parameter_blocks(ModelParams& params);
std::vector<ConstParamBlock> parameter_blocks(const ModelParams& params);
std::size_t parameter_count(const ModelParams& params);

/// Glorot-uniform W and U, zero biases with the forget-gate block set to 1,
/// Glorot-uniform head. Bit-identical for equal seeds.
ModelParams init_params(const Architecture& arch, RngSeed seed);
ModelParams init_params(std::size_t input_size, RngSeed seed);

struct LstmCache {
    Tensor3 x;       // layer input
    Tensor3 gates;   // post-activation (batch x steps x 4H)
    Tensor3 cell;    // c_t
    Tensor3 tanh_c;  // tanh(c_t)
    Tensor3 h;       // h_t
};

struct LstmForward {
    Tensor3 h_seq;
    LstmCache cache;
};

/// Runs the layer over every step from zero initial state.
LstmForward lstm_forward(const LstmLayerParams& params, const Tensor3& x);

struct LstmBackward {
    LstmLayerParams grad;  // same shapes as the parameters
    Tensor3 grad_x;        // empty unless requested
};

/// Backpropagation through time for the forward pass recorded in `cache`.
LstmBackward lstm_backward(const LstmLayerParams& params, const LstmCache& cache, const Tensor3& grad_h_seq,
                           bool want_grad_x = true);

struct DropoutResult {
    std::vector<double> values;
    std::vector<double> mask;  // 0 or 1/(1-rate); empty when the op is the identity
};

/// Inverted dropout. Identity when `training` is false or rate is 0.
DropoutResult dropout(std::span<const double> x, double rate, bool training, std::uint64_t seed);

struct LossResult {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Mean squared error and its gradient with respect to `pred`.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> m;  // per parameter block
    std::vector<std::vector<double>> v;

    static AdamState fresh(const ModelParams& params, const AdamConfig& config = {});
};

/// One bias-corrected Adam update of a single block at step `t` (t >= 1).
/// Throws std::invalid_argument naming `block` on a non-finite gradient.
void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 const AdamConfig& config, std::uint64_t t, std::string_view block = "parameters");

/// Advances `state.step` and updates every block. All gradients are checked
/// for finiteness before any parameter changes.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state);

/// Rescales `grads` so their global L2 norm is at most `max_norm`; returns
/// the norm before clipping.
double clip_global_norm(ModelParams& grads, double max_norm);

struct ModelCache {
    LstmCache layer1;
    LstmCache layer2;
    std::vector<double> mask1;   // dropout after layer1 (batch x steps x H1), empty if identity
    std::vector<double> mask2;   // dropout after layer2 (batch x H2), empty if identity
    std::vector<double> h2_out;  // dropped last hidden state of layer2 (batch x H2)
};

struct ModelForward {
    std::vector<double> pred;
    ModelCache cache;
};

/// Full model on a (batch x lookback x features) input. Dropout masks are
/// derived from `seed`, so equal seeds reproduce identical training passes.
ModelForward model_forward(const ModelParams& params, const Tensor3& x, bool training, std::uint64_t seed = 0);

struct ModelBackward {
    ModelParams grad;  // dropout_rate copied, not a gradient
    Tensor3 grad_x;    // empty unless requested
};

ModelBackward model_backward(const ModelParams& params, const ModelCache& cache, std::span<const double> grad_pred,
                             bool want_grad_x = false);

/// Inference-mode predictions.
std::vector<double> predict(const ModelParams& params, const Tensor3& x);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::string worst_block;
    std::size_t worst_index = 0;
    std::vector<std::pair<std::string, double>> per_block;  // max relative error per block
};

/// Analytic gradient of MSE(model(x), y) against central differences for
/// every parameter. In training mode the dropout masks are fixed by `seed`.
/// Relative error is |a - n| / max(|a|, |n|, 1e-7).
GradientCheckResult gradient_check(const ModelParams& params, const Tensor3& x, std::span<const double> y,
                                   std::uint64_t seed, bool training = true, double step = 1e-5);

}  // namespace tsf::nn
