#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsf/neural_core.hpp"
#include "tsf/preprocess.hpp"

namespace tsf {

struct TrainConfig {
    std::size_t epochs = 25;
    std::size_t batch_size = 32;
    std::size_t lookback = 60;
    double train_fraction = 0.8;
    nn::RngSeed seed{42};
    bool shuffle = true;
    std::size_t hidden1 = 64;
    std::size_t hidden2 = 64;
    double dropout_rate = 0.2;
    nn::AdamConfig adam;
    /// Global-norm gradient clipping; disabled when empty.
    std::optional<double> clip_norm;

    void validate() const;
    SplitSpec split() const { return {train_fraction, lookback}; }
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // 1-based; first minimum of val_loss
    double best_val_loss = 0.0;
    std::size_t optimizer_steps = 0;
    double wall_seconds = 0.0;
};

/// `epoch,train_loss,val_loss` rows with round-trip precision.
void write_report_csv(std::ostream& out, const TrainReport& report);

/// Everything needed to run a trained model on new data.
struct Checkpoint {
    static constexpr std::uint32_t kFormatVersion = 1;

    nn::ModelParams params;
    std::size_t lookback = 60;
    double train_fraction = 0.8;
    std::string target_column = "close";
    ScalerParams scaler;
    std::vector<std::string> manifest;
    double best_val_loss = 0.0;
    std::size_t epoch = 0;

    nn::Architecture architecture() const { return params.architecture(); }
    /// Throws std::invalid_argument if manifest, scaler and weights disagree.
    void validate() const;
    bool operator==(const Checkpoint&) const = default;
};

struct TrainInputs {
    DatasetSplit data;
    ScalerParams scaler;
    std::vector<std::string> manifest;
    std::string target_column = "close";
};

struct TrainResult {
    Checkpoint checkpoint;
    TrainReport report;
};

/// Raised when the loss or a gradient becomes non-finite. `partial` holds
/// every epoch that finished with finite losses.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& what, TrainReport partial)
        : std::runtime_error(what), partial(std::move(partial)) {}
    TrainReport partial;
};

/// Mini-batch Adam on the training partition, validation MSE on the held-out
/// partition after each epoch, keeping the weights of the best epoch.
TrainResult train(const TrainInputs& inputs, const TrainConfig& config);

/// Same as train() but starts from the given weights.
TrainResult train(const TrainInputs& inputs, const TrainConfig& config, nn::ModelParams initial);

/// Packs `count` windows of `dataset` starting at the given indices.
nn::Tensor3 to_tensor(const WindowedDataset& dataset, std::span<const std::size_t> indices);
nn::Tensor3 to_tensor(const WindowedDataset& dataset);

/// Inference-mode predictions in scaled units. Throws std::invalid_argument
/// naming the mismatched dimension.
std::vector<double> predict_batch(const Checkpoint& checkpoint, const nn::Tensor3& inputs);

/// MSE of the model over a dataset in inference mode (evaluated in chunks).
double dataset_loss(const nn::ModelParams& params, const WindowedDataset& dataset);

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Binary container: magic, format version, JSON header (architecture,
/// manifest, scaler, training metadata), little-endian f64 payload, and a
/// CRC-32 of the payload.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint load_checkpoint(const std::string& path);
Checkpoint load_checkpoint(std::istream& in);

}  // namespace tsf
