#include "tsf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include <spdlog/spdlog.h>

#include "tsf/csv.hpp"

namespace tsf {

namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::size_t kEvalChunk = 256;

void shuffle(std::vector<std::size_t>& order, nn::Rng& rng) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (hidden1 < 1 || hidden2 < 1) throw std::invalid_argument("hidden sizes must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
    if (clip_norm && !(*clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be > 0");
    split().validate();
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
    out << "epoch,train_loss,val_loss\n";
    for (const auto& e : report.epochs)
        out << e.epoch << ',' << csv::format_double(e.train_loss) << ',' << csv::format_double(e.val_loss) << '\n';
}

void Checkpoint::validate() const {
    params.validate();
    const auto arch = params.architecture();
    if (manifest.size() != arch.input_size)
        throw std::invalid_argument("manifest lists " + std::to_string(manifest.size()) +
                                    " columns but the model takes " + std::to_string(arch.input_size) + " features");
    if (scaler.columns.size() != manifest.size())
        throw std::invalid_argument("scaler and manifest column counts differ");
    for (std::size_t i = 0; i < manifest.size(); ++i)
        if (scaler.columns[i].name != manifest[i])
            throw std::invalid_argument("scaler column '" + scaler.columns[i].name + "' does not match manifest column '" +
                                        manifest[i] + "'");
    if (std::find(manifest.begin(), manifest.end(), target_column) == manifest.end())
        throw std::invalid_argument("target column '" + target_column + "' is not in the manifest");
    if (lookback < 1) throw std::invalid_argument("lookback must be >= 1");
}

nn::Tensor3 to_tensor(const WindowedDataset& dataset, std::span<const std::size_t> indices) {
    nn::Tensor3 x(indices.size(), dataset.lookback(), dataset.n_features());
    const std::size_t stride = dataset.lookback() * dataset.n_features();
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto w = dataset.window(indices[i]);
        std::copy(w.begin(), w.end(), x.data.begin() + static_cast<std::ptrdiff_t>(i * stride));
    }
    return x;
}

nn::Tensor3 to_tensor(const WindowedDataset& dataset) {
    nn::Tensor3 x(dataset.size(), dataset.lookback(), dataset.n_features());
    std::copy(dataset.inputs().begin(), dataset.inputs().end(), x.data.begin());
    return x;
}

double dataset_loss(const nn::ModelParams& params, const WindowedDataset& dataset) {
    if (dataset.empty()) throw std::invalid_argument("dataset_loss: empty dataset");
    double sse = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t begin = 0; begin < dataset.size(); begin += kEvalChunk) {
        const std::size_t end = std::min(dataset.size(), begin + kEvalChunk);
        idx.resize(end - begin);
        std::iota(idx.begin(), idx.end(), begin);
        const auto pred = nn::predict(params, to_tensor(dataset, idx));
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double d = pred[i] - dataset.targets()[begin + i];
            sse += d * d;
        }
    }
    return sse / static_cast<double>(dataset.size());
}

TrainResult train(const TrainInputs& inputs, const TrainConfig& config) {
    config.validate();
    nn::Architecture arch{inputs.data.train.n_features(), config.hidden1, config.hidden2, config.dropout_rate};
    if (arch.input_size == 0) throw std::invalid_argument("train: dataset has no features");
    return train(inputs, config, nn::init_params(arch, nn::RngSeed{nn::mix_seed(config.seed.value, kInitStream)}));
}

TrainResult train(const TrainInputs& inputs, const TrainConfig& config, nn::ModelParams initial) {
    config.validate();
    const auto& train_set = inputs.data.train;
    const auto& val_set = inputs.data.test;
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    if (val_set.empty()) throw std::invalid_argument("train: empty validation set");
    if (train_set.lookback() != config.lookback)
        throw std::invalid_argument("train: dataset lookback " + std::to_string(train_set.lookback()) +
                                    " differs from configured lookback " + std::to_string(config.lookback));
    initial.validate();
    if (initial.layer1.input_size != train_set.n_features())
        throw std::invalid_argument("train: model expects " + std::to_string(initial.layer1.input_size) +
                                    " features, dataset has " + std::to_string(train_set.n_features()));

    const auto started = std::chrono::steady_clock::now();
    nn::ModelParams params = std::move(initial);
    nn::AdamState adam = nn::AdamState::fresh(params, config.adam);
    nn::Rng shuffle_rng(nn::mix_seed(config.seed.value, kShuffleStream));
    const std::uint64_t dropout_seed = nn::mix_seed(config.seed.value, kDropoutStream);

    TrainReport report;
    nn::ModelParams best = params;
    std::vector<std::size_t> order(train_set.size());
    std::vector<double> targets;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (config.shuffle) shuffle(order, shuffle_rng);

        double weighted_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + begin, end - begin);
            const auto x = to_tensor(train_set, batch);
            targets.clear();
            for (auto i : batch) targets.push_back(train_set.targets()[i]);

            const auto fwd = nn::model_forward(params, x, true, nn::mix_seed(dropout_seed, adam.step));
            const auto loss = nn::mse_loss(fwd.pred, targets);
            if (!std::isfinite(loss.loss)) {
                throw TrainingDiverged("training diverged in epoch " + std::to_string(epoch) +
                                           "; last finite epoch " + std::to_string(report.epochs.size()),
                                       report);
            }
            auto grads = nn::model_backward(params, fwd.cache, loss.grad).grad;
            if (config.clip_norm) nn::clip_global_norm(grads, *config.clip_norm);
            try {
                nn::adam_step(params, grads, adam);
            } catch (const std::invalid_argument& e) {
                throw TrainingDiverged(std::string(e.what()) + " in epoch " + std::to_string(epoch) +
                                           "; last finite epoch " + std::to_string(report.epochs.size()),
                                       report);
            }
            weighted_loss += loss.loss * static_cast<double>(batch.size());
        }

        EpochRecord record{epoch, weighted_loss / static_cast<double>(order.size()), dataset_loss(params, val_set)};
        if (!std::isfinite(record.train_loss) || !std::isfinite(record.val_loss)) {
            throw TrainingDiverged("non-finite loss after epoch " + std::to_string(epoch) + "; last finite epoch " +
                                       std::to_string(report.epochs.size()),
                                   report);
        }
        if (report.epochs.empty() || record.val_loss < report.best_val_loss) {
            report.best_val_loss = record.val_loss;
            report.best_epoch = epoch;
            best = params;
        }
        spdlog::debug("epoch {}: train_loss={} val_loss={}", epoch, record.train_loss, record.val_loss);
        report.epochs.push_back(record);
    }
    report.optimizer_steps = adam.step;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    TrainResult result;
    result.report = std::move(report);
    Checkpoint& ck = result.checkpoint;
    ck.params = std::move(best);
    ck.lookback = config.lookback;
    ck.train_fraction = config.train_fraction;
    ck.target_column = inputs.target_column;
    ck.scaler = inputs.scaler;
    ck.manifest = inputs.manifest;
    ck.best_val_loss = result.report.best_val_loss;
    ck.epoch = result.report.best_epoch;
    return result;
}

std::vector<double> predict_batch(const Checkpoint& checkpoint, const nn::Tensor3& inputs) {
    const auto arch = checkpoint.architecture();
    if (inputs.features != arch.input_size)
        throw std::invalid_argument("feature count mismatch: input has " + std::to_string(inputs.features) +
                                    ", checkpoint expects " + std::to_string(arch.input_size));
    if (inputs.steps != checkpoint.lookback)
        throw std::invalid_argument("lookback mismatch: input has " + std::to_string(inputs.steps) +
                                    " steps, checkpoint expects " + std::to_string(checkpoint.lookback));
    if (inputs.batch == 0) return {};
    return nn::predict(checkpoint.params, inputs);
}

}  // namespace tsf
