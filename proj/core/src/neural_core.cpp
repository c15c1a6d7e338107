#include "tsf/neural_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace tsf::nn {

namespace {

constexpr std::string_view kBlockNames[] = {"layer1.W", "layer1.U", "layer1.b", "layer2.W",
                                            "layer2.U", "layer2.b", "head.w",   "head.b"};

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// y += a * x
inline void axpy(double* __restrict y, const double* __restrict x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// out (cols x rows) = transpose of in (rows x cols)
std::vector<double> transpose(const std::vector<double>& in, std::size_t rows, std::size_t cols) {
    std::vector<double> out(in.size());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = in[r * cols + c];
    return out;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void glorot(std::vector<double>& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& x : w) x = rng.uniform(-limit, limit);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

LstmLayerParams LstmLayerParams::zeros(std::size_t input_size, std::size_t hidden_size) {
    LstmLayerParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    p.W.assign(4 * hidden_size * input_size, 0.0);
    p.U.assign(4 * hidden_size * hidden_size, 0.0);
    p.b.assign(4 * hidden_size, 0.0);
    return p;
}

void LstmLayerParams::validate() const {
    if (input_size == 0 || hidden_size == 0) throw std::invalid_argument("LSTM layer sizes must be >= 1");
    if (W.size() != 4 * hidden_size * input_size || U.size() != 4 * hidden_size * hidden_size ||
        b.size() != 4 * hidden_size)
        throw std::invalid_argument("LSTM parameter shapes inconsistent with declared sizes");
    if (!all_finite(W) || !all_finite(U) || !all_finite(b))
        throw std::invalid_argument("LSTM parameters contain non-finite values");
}

ModelParams ModelParams::zeros(const Architecture& arch) {
    ModelParams p;
    p.layer1 = LstmLayerParams::zeros(arch.input_size, arch.hidden1);
    p.layer2 = LstmLayerParams::zeros(arch.hidden1, arch.hidden2);
    p.head.w.assign(arch.hidden2, 0.0);
    p.head.b.assign(1, 0.0);
    p.dropout_rate = arch.dropout_rate;
    return p;
}

Architecture ModelParams::architecture() const {
    return {layer1.input_size, layer1.hidden_size, layer2.hidden_size, dropout_rate};
}

void ModelParams::validate() const {
    layer1.validate();
    layer2.validate();
    if (layer2.input_size != layer1.hidden_size)
        throw std::invalid_argument("layer2 input size must equal layer1 hidden size");
    if (head.w.size() != layer2.hidden_size || head.b.size() != 1)
        throw std::invalid_argument("dense head shape inconsistent with layer2");
    if (!all_finite(head.w) || !all_finite(head.b)) throw std::invalid_argument("dense head has non-finite values");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
}

std::vector<ParamBlock> parameter_blocks(ModelParams& p) {
    return {{kBlockNames[0], p.layer1.W}, {kBlockNames[1], p.layer1.U}, {kBlockNames[2], p.layer1.b},
            {kBlockNames[3], p.layer2.W}, {kBlockNames[4], p.layer2.U}, {kBlockNames[5], p.layer2.b},
            {kBlockNames[6], p.head.w},   {kBlockNames[7], p.head.b}};
}

std::vector<ConstParamBlock> parameter_blocks(const ModelParams& p) {
    return {{kBlockNames[0], p.layer1.W}, {kBlockNames[1], p.layer1.U}, {kBlockNames[2], p.layer1.b},
            {kBlockNames[3], p.layer2.W}, {kBlockNames[4], p.layer2.U}, {kBlockNames[5], p.layer2.b},
            {kBlockNames[6], p.head.w},   {kBlockNames[7], p.head.b}};
}

std::size_t parameter_count(const ModelParams& params) {
    std::size_t n = 0;
    for (const auto& block : parameter_blocks(params)) n += block.values.size();
    return n;
}

ModelParams init_params(const Architecture& arch, RngSeed seed) {
    if (arch.input_size < 1) throw std::invalid_argument("init_params: input_size must be >= 1");
    if (arch.hidden1 < 1 || arch.hidden2 < 1) throw std::invalid_argument("init_params: hidden sizes must be >= 1");
    ModelParams p = ModelParams::zeros(arch);
    p.validate();
    Rng rng(seed.value);
    for (LstmLayerParams* layer : {&p.layer1, &p.layer2}) {
        const std::size_t h = layer->hidden_size;
        glorot(layer->W, layer->input_size, 4 * h, rng);
        glorot(layer->U, h, 4 * h, rng);
        std::fill(layer->b.begin() + static_cast<std::ptrdiff_t>(kForgetGate * h),
                  layer->b.begin() + static_cast<std::ptrdiff_t>((kForgetGate + 1) * h), 1.0);
    }
    glorot(p.head.w, arch.hidden2, 1, rng);
    return p;
}

ModelParams init_params(std::size_t input_size, RngSeed seed) {
    Architecture arch;
    arch.input_size = input_size;
    return init_params(arch, seed);
}

LstmForward lstm_forward(const LstmLayerParams& params, const Tensor3& x) {
    if (x.features != params.input_size)
        throw std::invalid_argument("lstm_forward: input has " + std::to_string(x.features) +
                                    " features, layer expects " + std::to_string(params.input_size));
    if (x.data.size() != x.batch * x.steps * x.features) throw std::invalid_argument("lstm_forward: bad tensor");
    if (!all_finite(x.data)) throw std::invalid_argument("lstm_forward: non-finite input");

    const std::size_t B = x.batch, T = x.steps, I = x.features, H = params.hidden_size, G = 4 * H;
    const std::vector<double> WT = transpose(params.W, G, I);  // (I x 4H)
    const std::vector<double> UT = transpose(params.U, G, H);  // (H x 4H)

    LstmForward out;
    LstmCache& cache = out.cache;
    cache.x = x;
    cache.gates = Tensor3(B, T, G);
    cache.cell = Tensor3(B, T, H);
    cache.tanh_c = Tensor3(B, T, H);
    cache.h = Tensor3(B, T, H);

    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t t = 0; t < T; ++t) {
            double* z = cache.gates.row(b, t).data();
            std::copy(params.b.begin(), params.b.end(), z);
            const double* xt = x.row(b, t).data();
            for (std::size_t k = 0; k < I; ++k) axpy(z, &WT[k * G], xt[k], G);
            if (t > 0) {
                const double* hp = cache.h.row(b, t - 1).data();
                for (std::size_t k = 0; k < H; ++k) axpy(z, &UT[k * G], hp[k], G);
            }
            double* c = cache.cell.row(b, t).data();
            double* tc = cache.tanh_c.row(b, t).data();
            double* h = cache.h.row(b, t).data();
            const double* cp = t > 0 ? cache.cell.row(b, t - 1).data() : nullptr;
            for (std::size_t j = 0; j < H; ++j) {
                const double ig = sigmoid(z[j]);
                const double fg = sigmoid(z[H + j]);
                const double gg = std::tanh(z[2 * H + j]);
                const double og = sigmoid(z[3 * H + j]);
                z[j] = ig;
                z[H + j] = fg;
                z[2 * H + j] = gg;
                z[3 * H + j] = og;
                c[j] = (cp ? fg * cp[j] : 0.0) + ig * gg;
                tc[j] = std::tanh(c[j]);
                h[j] = og * tc[j];
            }
        }
    }
    out.h_seq = cache.h;
    return out;
}

LstmBackward lstm_backward(const LstmLayerParams& params, const LstmCache& cache, const Tensor3& grad_h_seq,
                           bool want_grad_x) {
    const std::size_t B = cache.x.batch, T = cache.x.steps, I = cache.x.features, H = params.hidden_size, G = 4 * H;
    if (I != params.input_size || cache.h.features != H || cache.h.batch != B || cache.h.steps != T)
        throw std::invalid_argument("lstm_backward: cache does not match layer parameters");
    if (grad_h_seq.batch != B || grad_h_seq.steps != T || grad_h_seq.features != H)
        throw std::invalid_argument("lstm_backward: gradient shape does not match cache");

    LstmBackward out;
    out.grad = LstmLayerParams::zeros(I, H);
    if (want_grad_x) out.grad_x = Tensor3(B, T, I);
    std::vector<double> dWT(I * G, 0.0);  // accumulated transposed, (I x 4H)
    std::vector<double> dUT(H * G, 0.0);
    std::vector<double> dz(G);
    std::vector<double> dh(H);
    std::vector<double> dh_next(H);
    std::vector<double> dc_next(H);

    for (std::size_t b = 0; b < B; ++b) {
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        std::fill(dc_next.begin(), dc_next.end(), 0.0);
        for (std::size_t t = T; t-- > 0;) {
            const double* gates = cache.gates.row(b, t).data();
            const double* tc = cache.tanh_c.row(b, t).data();
            const double* cp = t > 0 ? cache.cell.row(b, t - 1).data() : nullptr;
            const double* gh = grad_h_seq.row(b, t).data();
            for (std::size_t j = 0; j < H; ++j) {
                const double ig = gates[j], fg = gates[H + j], gg = gates[2 * H + j], og = gates[3 * H + j];
                const double dhj = gh[j] + dh_next[j];
                const double dc = dc_next[j] + dhj * og * (1.0 - tc[j] * tc[j]);
                const double c_prev = cp ? cp[j] : 0.0;
                dz[j] = dc * gg * ig * (1.0 - ig);
                dz[H + j] = dc * c_prev * fg * (1.0 - fg);
                dz[2 * H + j] = dc * ig * (1.0 - gg * gg);
                dz[3 * H + j] = dhj * tc[j] * og * (1.0 - og);
                dc_next[j] = dc * fg;
            }
            axpy(out.grad.b.data(), dz.data(), 1.0, G);
            const double* xt = cache.x.row(b, t).data();
            for (std::size_t k = 0; k < I; ++k) axpy(&dWT[k * G], dz.data(), xt[k], G);
            if (t > 0) {
                const double* hp = cache.h.row(b, t - 1).data();
                for (std::size_t k = 0; k < H; ++k) axpy(&dUT[k * G], dz.data(), hp[k], G);
            }
            if (want_grad_x) {
                double* dx = out.grad_x.row(b, t).data();
                for (std::size_t r = 0; r < G; ++r) axpy(dx, &params.W[r * I], dz[r], I);
            }
            std::fill(dh.begin(), dh.end(), 0.0);
            if (t > 0)
                for (std::size_t r = 0; r < G; ++r) axpy(dh.data(), &params.U[r * H], dz[r], H);
            dh_next.swap(dh);
        }
    }
    out.grad.W = transpose(dWT, I, G);
    out.grad.U = transpose(dUT, H, G);
    return out;
}

DropoutResult dropout(std::span<const double> x, double rate, bool training, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
    DropoutResult out;
    out.values.assign(x.begin(), x.end());
    if (!training || rate == 0.0) return out;
    const double keep_scale = 1.0 / (1.0 - rate);
    Rng rng(seed);
    out.mask.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
        out.values[i] *= out.mask[i];
    }
    return out;
}

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("mse_loss: " + std::to_string(pred.size()) + " predictions vs " +
                                    std::to_string(target.size()) + " targets");
    if (pred.empty()) throw std::invalid_argument("mse_loss: empty input");
    const double n = static_cast<double>(pred.size());
    LossResult out;
    out.grad.resize(pred.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        sum += d * d;
        out.grad[i] = 2.0 * d / n;
    }
    out.loss = sum / n;
    return out;
}

AdamState AdamState::fresh(const ModelParams& params, const AdamConfig& config) {
    AdamState s;
    s.config = config;
    for (const auto& block : parameter_blocks(params)) {
        s.m.emplace_back(block.values.size(), 0.0);
        s.v.emplace_back(block.values.size(), 0.0);
    }
    return s;
}

void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 const AdamConfig& config, std::uint64_t t, std::string_view block) {
    if (grad.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size())
        throw std::invalid_argument("adam_update: shape mismatch in " + std::string(block));
    if (t < 1) throw std::invalid_argument("adam_update: step must be >= 1");
    if (!all_finite(grad)) throw std::invalid_argument("non-finite gradient in " + std::string(block));
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
        v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        theta[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state) {
    auto blocks = parameter_blocks(params);
    const auto gblocks = parameter_blocks(grads);
    if (state.m.size() != blocks.size() || state.v.size() != blocks.size())
        throw std::invalid_argument("adam_step: optimizer state does not mirror parameters");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (gblocks[i].values.size() != blocks[i].values.size() || state.m[i].size() != blocks[i].values.size())
            throw std::invalid_argument("adam_step: shape mismatch in " + std::string(blocks[i].name));
        if (!all_finite(gblocks[i].values))
            throw std::invalid_argument("non-finite gradient in " + std::string(blocks[i].name));
    }
    ++state.step;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        adam_update(blocks[i].values, gblocks[i].values, state.m[i], state.v[i], state.config, state.step,
                    blocks[i].name);
}

double clip_global_norm(ModelParams& grads, double max_norm) {
    double sq = 0.0;
    for (const auto& block : parameter_blocks(std::as_const(grads)))
        for (double g : block.values) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (auto& block : parameter_blocks(grads))
            for (auto& g : block.values) g *= scale;
    }
    return norm;
}

ModelForward model_forward(const ModelParams& params, const Tensor3& x, bool training, std::uint64_t seed) {
    if (x.features != params.layer1.input_size)
        throw std::invalid_argument("model_forward: input has " + std::to_string(x.features) +
                                    " features, model expects " + std::to_string(params.layer1.input_size));
    if (x.batch == 0 || x.steps == 0) throw std::invalid_argument("model_forward: empty input");
    const std::size_t B = x.batch, T = x.steps, H1 = params.layer1.hidden_size, H2 = params.layer2.hidden_size;

    ModelForward out;
    ModelCache& cache = out.cache;

    auto l1 = lstm_forward(params.layer1, x);
    cache.layer1 = std::move(l1.cache);
    auto d1 = dropout(l1.h_seq.data, params.dropout_rate, training, mix_seed(seed, 1));
    cache.mask1 = std::move(d1.mask);
    Tensor3 h1(B, T, H1);
    h1.data = std::move(d1.values);

    auto l2 = lstm_forward(params.layer2, h1);
    cache.layer2 = std::move(l2.cache);
    std::vector<double> last(B * H2);
    for (std::size_t b = 0; b < B; ++b) {
        auto row = l2.h_seq.row(b, T - 1);
        std::copy(row.begin(), row.end(), last.begin() + static_cast<std::ptrdiff_t>(b * H2));
    }
    auto d2 = dropout(last, params.dropout_rate, training, mix_seed(seed, 2));
    cache.mask2 = std::move(d2.mask);
    cache.h2_out = std::move(d2.values);

    out.pred.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
        double y = params.head.b[0];
        const double* h = &cache.h2_out[b * H2];
        for (std::size_t k = 0; k < H2; ++k) y += params.head.w[k] * h[k];
        out.pred[b] = y;
    }
    return out;
}

ModelBackward model_backward(const ModelParams& params, const ModelCache& cache, std::span<const double> grad_pred,
                             bool want_grad_x) {
    const std::size_t B = cache.layer1.x.batch, T = cache.layer1.x.steps;
    const std::size_t H2 = params.layer2.hidden_size;
    if (grad_pred.size() != B) throw std::invalid_argument("model_backward: gradient length does not match batch");

    ModelBackward out;
    out.grad = ModelParams::zeros(params.architecture());

    Tensor3 dh2(B, T, H2);
    for (std::size_t b = 0; b < B; ++b) {
        const double g = grad_pred[b];
        out.grad.head.b[0] += g;
        axpy(out.grad.head.w.data(), &cache.h2_out[b * H2], g, H2);
        double* d = dh2.row(b, T - 1).data();
        for (std::size_t k = 0; k < H2; ++k) {
            const double m = cache.mask2.empty() ? 1.0 : cache.mask2[b * H2 + k];
            d[k] = g * params.head.w[k] * m;
        }
    }

    auto g2 = lstm_backward(params.layer2, cache.layer2, dh2, true);
    out.grad.layer2 = std::move(g2.grad);
    Tensor3 dh1 = std::move(g2.grad_x);
    if (!cache.mask1.empty())
        for (std::size_t i = 0; i < dh1.data.size(); ++i) dh1.data[i] *= cache.mask1[i];

    auto g1 = lstm_backward(params.layer1, cache.layer1, dh1, want_grad_x);
    out.grad.layer1 = std::move(g1.grad);
    if (want_grad_x) out.grad_x = std::move(g1.grad_x);
    return out;
}

std::vector<double> predict(const ModelParams& params, const Tensor3& x) {
    return model_forward(params, x, false).pred;
}

GradientCheckResult gradient_check(const ModelParams& params, const Tensor3& x, std::span<const double> y,
                                   std::uint64_t seed, bool training, double step) {
    auto loss_at = [&](const ModelParams& p) { return mse_loss(model_forward(p, x, training, seed).pred, y).loss; };

    const auto fwd = model_forward(params, x, training, seed);
    const auto loss = mse_loss(fwd.pred, y);
    const auto analytic = model_backward(params, fwd.cache, loss.grad);

    GradientCheckResult result;
    ModelParams probe = params;
    auto probe_blocks = parameter_blocks(probe);
    const auto grad_blocks = parameter_blocks(analytic.grad);
    for (std::size_t bi = 0; bi < probe_blocks.size(); ++bi) {
        double block_max = 0.0;
        auto values = probe_blocks[bi].values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + step;
            const double up = loss_at(probe);
            values[i] = saved - step;
            const double down = loss_at(probe);
            values[i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double a = grad_blocks[bi].values[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
            const double rel = std::abs(a - numeric) / denom;
            block_max = std::max(block_max, rel);
            if (rel > result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst_block = std::string(probe_blocks[bi].name);
                result.worst_index = i;
            }
        }
        result.per_block.emplace_back(std::string(probe_blocks[bi].name), block_max);
    }
    return result;
}

}  // namespace tsf::nn
