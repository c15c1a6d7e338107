#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "pipeline.hpp"
#include "synthetic.hpp"
#include "tsf/trainer.hpp"

using namespace tsf;

namespace {

TrainInputs sine_inputs(std::size_t lookback = 10) {
    const auto frame = synth::sine_frame(120);
    const SplitSpec spec{0.8, lookback};
    TrainInputs in;
    in.scaler = fit_minmax(frame, spec.training_rows(frame.rows()));
    in.data = chronological_split(make_windows(transform(frame, in.scaler), lookback, "close"), spec);
    in.manifest = frame.column_names();
    return in;
}

TrainConfig small_config() {
    TrainConfig c;
    c.epochs = 3;
    c.batch_size = 16;
    c.lookback = 10;
    c.hidden1 = 6;
    c.hidden2 = 5;
    c.seed = nn::RngSeed{1};
    return c;
}

std::string report_csv(const TrainReport& r) {
    std::ostringstream s;
    write_report_csv(s, r);
    return s.str();
}

}  // namespace

TEST(TrainConfig, DefaultsAndValidation) {
    const TrainConfig c;
    EXPECT_EQ(c.epochs, 25u);
    EXPECT_EQ(c.batch_size, 32u);
    EXPECT_EQ(c.lookback, 60u);
    EXPECT_EQ(c.train_fraction, 0.8);
    auto bad = c;
    bad.epochs = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.batch_size = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.lookback = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Train, OneEpochFullBatchIsOneStep) {
    auto cfg = small_config();
    cfg.epochs = 1;
    cfg.batch_size = 10000;
    const auto r = train(sine_inputs(), cfg);
    EXPECT_EQ(r.report.optimizer_steps, 1u);
}

TEST(Train, StepCountIncludesPartialBatch) {
    const auto in = sine_inputs();
    auto cfg = small_config();
    const auto r = train(in, cfg);
    const std::size_t per_epoch = (in.data.train.size() + cfg.batch_size - 1) / cfg.batch_size;
    EXPECT_EQ(r.report.optimizer_steps, cfg.epochs * per_epoch);
    EXPECT_EQ(r.report.epochs.size(), cfg.epochs);
    EXPECT_EQ(r.report.epochs.front().epoch, 1u);
}

TEST(Train, BestEpochIsFirstMinimum) {
    auto cfg = small_config();
    cfg.epochs = 8;
    const auto r = train(sine_inputs(), cfg);
    double best = r.report.epochs.front().val_loss;
    std::size_t best_epoch = 1;
    for (const auto& e : r.report.epochs)
        if (e.val_loss < best) {
            best = e.val_loss;
            best_epoch = e.epoch;
        }
    EXPECT_EQ(r.report.best_epoch, best_epoch);
    EXPECT_EQ(r.report.best_val_loss, best);
    EXPECT_EQ(r.checkpoint.epoch, best_epoch);
    EXPECT_EQ(dataset_loss(r.checkpoint.params, sine_inputs().data.test), best);
}

TEST(Train, DeterministicForSeed) {
    const auto in = sine_inputs();
    const auto a = train(in, small_config());
    const auto b = train(in, small_config());
    EXPECT_EQ(report_csv(a.report), report_csv(b.report));
    EXPECT_EQ(a.checkpoint, b.checkpoint);
    auto other = small_config();
    other.seed = nn::RngSeed{2};
    EXPECT_NE(report_csv(train(in, other).report), report_csv(a.report));
}

TEST(Train, ShuffleOffIsStillDeterministic) {
    const auto in = sine_inputs();
    auto cfg = small_config();
    cfg.shuffle = false;
    EXPECT_EQ(report_csv(train(in, cfg).report), report_csv(train(in, cfg).report));
}

TEST(Train, ValidationDoesNotTouchParameters) {
    const auto in = sine_inputs();
    const auto p = nn::init_params(nn::Architecture{1, 4, 4, 0.2}, nn::RngSeed{3});
    const auto copy = p;
    (void)dataset_loss(p, in.data.test);
    EXPECT_EQ(p, copy);
}

TEST(Train, EmptyTrainingSetRejected) {
    auto in = sine_inputs();
    in.data.train = WindowedDataset{};
    EXPECT_THROW(train(in, small_config()), std::invalid_argument);
}

TEST(Train, DivergenceReportsLastFiniteEpoch) {
    auto cfg = small_config();
    cfg.adam.lr = 1e308;
    cfg.epochs = 5;
    try {
        train(sine_inputs(), cfg);
        FAIL() << "expected divergence";
    } catch (const TrainingDiverged& e) {
        EXPECT_LT(e.partial.epochs.size(), 5u);
        EXPECT_NE(std::string(e.what()).find("last finite epoch"), std::string::npos);
    }
}

TEST(Train, ReportCsvHeader) {
    TrainReport r;
    r.epochs = {{1, 0.5, 0.25}};
    EXPECT_EQ(report_csv(r), "epoch,train_loss,val_loss\n1,0.5,0.25\n");
}

TEST(PredictBatch, MismatchNamesDimension) {
    const auto r = train(sine_inputs(), small_config());
    try {
        predict_batch(r.checkpoint, nn::Tensor3(1, 10, 2));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("feature count"), std::string::npos);
    }
    try {
        predict_batch(r.checkpoint, nn::Tensor3(1, 9, 1));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("lookback"), std::string::npos);
    }
}

class CheckpointTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() { trained_ = new TrainResult(train(sine_inputs(), small_config())); }
    static void TearDownTestSuite() { delete trained_; }

    static std::string bytes() {
        std::ostringstream s;
        save_checkpoint(trained_->checkpoint, s);
        return s.str();
    }
    static Checkpoint load(const std::string& b) {
        std::istringstream in(b);
        return load_checkpoint(in);
    }
    static void expect_error(const std::string& b, const std::string& fragment) {
        try {
            load(b);
            FAIL() << "expected " << fragment;
        } catch (const CheckpointError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    }

    static TrainResult* trained_;
};

TrainResult* CheckpointTest::trained_ = nullptr;

TEST_F(CheckpointTest, RoundTripIsExact) {
    const auto b = bytes();
    const auto c = load(b);
    EXPECT_EQ(c, trained_->checkpoint);
    const auto x = to_tensor(sine_inputs().data.test);
    const auto p1 = predict_batch(trained_->checkpoint, x);
    const auto p2 = predict_batch(c, x);
    EXPECT_EQ(std::memcmp(p1.data(), p2.data(), p1.size() * sizeof(double)), 0);
    std::ostringstream again;
    save_checkpoint(c, again);
    EXPECT_EQ(again.str(), b);
}

TEST_F(CheckpointTest, FileRoundTrip) {
    const std::string path = ::testing::TempDir() + "/tsf_ck_test.tsfck";
    save_checkpoint(trained_->checkpoint, path);
    EXPECT_EQ(load_checkpoint(path), trained_->checkpoint);
    EXPECT_THROW(load_checkpoint(path + ".missing"), CheckpointError);
}

TEST_F(CheckpointTest, PayloadCorruptionDetected) {
    auto b = bytes();
    b[b.size() - 20] ^= 0x40;
    expect_error(b, "integrity");
}

TEST_F(CheckpointTest, VersionMismatchIsExplicit) {
    auto b = bytes();
    b[8] = static_cast<char>(Checkpoint::kFormatVersion + 1);
    expect_error(b, "version 2");
}

TEST_F(CheckpointTest, TruncationDetected) {
    const auto b = bytes();
    expect_error(b.substr(0, b.size() - 3), "truncated");
    expect_error(b.substr(0, 30), "truncated");
    expect_error("NOTACKPT" + b.substr(8), "magic");
}

TEST_F(CheckpointTest, InconsistentManifestRejected) {
    auto c = trained_->checkpoint;
    c.manifest.push_back("extra");
    std::ostringstream s;
    EXPECT_THROW(save_checkpoint(c, s), std::invalid_argument);
}
