#include "tsforecast/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tsf/attribution.hpp"
#include "tsf/evaluation.hpp"
#include "tsf/indicators.hpp"
#include "tsf/preprocess.hpp"
#include "tsf/timeseries_store.hpp"
#include "tsf/trainer.hpp"

namespace tsf::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kOutputRootEnv = "TSF_OUTPUT_ROOT";

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Relative output paths resolve against $TSF_OUTPUT_ROOT when it is set.
fs::path resolve_output(const std::string& out) {
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / p;
    }
    return p;
}

/// Buffers artifacts and publishes them together: each is written to a
/// temporary sibling and renamed only after every write succeeded.
class ArtifactSet {
public:
    void add(fs::path path, std::string content) { items_.push_back({std::move(path), std::move(content)}); }

    void commit() {
        std::vector<fs::path> temps;
        try {
            for (const auto& item : items_) {
                if (item.path.has_parent_path()) fs::create_directories(item.path.parent_path());
                fs::path tmp = item.path;
                tmp += ".tmp." + std::to_string(::getpid());
                std::ofstream out(tmp, std::ios::binary);
                temps.push_back(tmp);
                out.write(item.content.data(), static_cast<std::streamsize>(item.content.size()));
                out.close();
                if (!out) throw std::runtime_error("failed to write " + item.path.string());
            }
            for (std::size_t i = 0; i < items_.size(); ++i) fs::rename(temps[i], items_[i].path);
        } catch (...) {
            std::error_code ec;
            for (const auto& t : temps) fs::remove(t, ec);
            throw;
        }
    }

private:
    struct Item {
        fs::path path;
        std::string content;
    };
    std::vector<Item> items_;
};

struct RunManifest {
    std::string command;
    std::string ticker;
    json inputs = json::object();
    json config = json::object();
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string started = utc_now();

    std::string render() const {
        json j{{"command", command},
               {"ticker", ticker},
               {"inputs", inputs},
               {"config", config},
               {"config_hash", config_hash(config.dump())},
               {"output", output},
               {"stage_timestamps", {{"started", started}, {"finished", utc_now()}}}};
        j["seed"] = seed ? json(*seed) : json(nullptr);
        return j.dump(2) + "\n";
    }
};

fs::path sidecar(const fs::path& primary, const std::string& suffix) {
    fs::path p = primary;
    p += suffix;
    return p;
}

std::string frame_csv(const SeriesFrame& frame) {
    std::ostringstream out;
    write_frame_csv(out, frame);
    return out.str();
}

json config_to_json(const indicators::IndicatorConfig& cfg) {
    json j{{"returns", cfg.returns},
           {"sma_windows", cfg.sma_windows},
           {"ema_spans", cfg.ema_spans},
           {"range_position", cfg.range_position},
           {"temporal", cfg.temporal}};
    j["macd"] = cfg.macd ? json{{"fast", cfg.macd->fast}, {"slow", cfg.macd->slow}, {"signal", cfg.macd->signal}}
                         : json(nullptr);
    j["bollinger"] = cfg.bollinger ? json{{"window", cfg.bollinger->window}, {"num_std", cfg.bollinger->num_std}}
                                   : json(nullptr);
    return j;
}

indicators::IndicatorConfig config_from_json(const json& j) {
    indicators::IndicatorConfig cfg;
    if (j.contains("returns")) cfg.returns = j.at("returns").get<bool>();
    if (j.contains("sma_windows")) cfg.sma_windows = j.at("sma_windows").get<std::vector<int>>();
    if (j.contains("ema_spans")) cfg.ema_spans = j.at("ema_spans").get<std::vector<int>>();
    if (j.contains("range_position")) cfg.range_position = j.at("range_position").get<bool>();
    if (j.contains("temporal")) cfg.temporal = j.at("temporal").get<bool>();
    if (j.contains("macd")) {
        if (j.at("macd").is_null()) {
            cfg.macd.reset();
        } else {
            indicators::MacdConfig m;
            m.fast = j.at("macd").value("fast", m.fast);
            m.slow = j.at("macd").value("slow", m.slow);
            m.signal = j.at("macd").value("signal", m.signal);
            cfg.macd = m;
        }
    }
    if (j.contains("bollinger")) {
        if (j.at("bollinger").is_null()) {
            cfg.bollinger.reset();
        } else {
            indicators::BollingerConfig b;
            b.window = j.at("bollinger").value("window", b.window);
            b.num_std = j.at("bollinger").value("num_std", b.num_std);
            cfg.bollinger = b;
        }
    }
    cfg.validate();
    return cfg;
}

indicators::IndicatorConfig load_indicator_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config '" + path + "'");
    return config_from_json(json::parse(in));
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::string ohlcv;
    std::string fundamentals;
    std::string out;
    std::string date_format;
    std::string date_column = "Date";
    std::vector<std::string> mappings;
    std::string ticker;
};

int cmd_ingest(const IngestArgs& a) {
    RunManifest run;
    run.command = "ingest";
    run.ticker = a.ticker;

    CsvSchema schema = CsvSchema::ohlcv();
    schema.date_column = a.date_column;
    schema.date_format = a.date_format;
    for (const auto& m : a.mappings) {
        const auto eq = m.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--map expects canonical=Header, got '" + m + "'");
        const std::string canonical = m.substr(0, eq);
        const std::string header = m.substr(eq + 1);
        auto it = std::find_if(schema.columns.begin(), schema.columns.end(),
                               [&](const auto& p) { return p.first == canonical; });
        if (it == schema.columns.end())
            schema.columns.emplace_back(canonical, header);
        else
            it->second = header;
    }

    auto parsed = parse_ohlcv_csv(a.ohlcv, schema);
    std::size_t missing_before = 0;
    for (std::size_t c = 0; c < parsed.frame.cols(); ++c)
        for (double v : parsed.frame.column(c)) missing_before += is_missing(v);
    SeriesFrame frame = forward_fill(parsed.frame);
    std::size_t missing_after = 0;
    for (std::size_t c = 0; c < frame.cols(); ++c)
        for (double v : frame.column(c)) missing_after += is_missing(v);

    std::size_t fundamentals_records = 0;
    if (!a.fundamentals.empty()) {
        auto records = parse_fundamentals_csv(a.fundamentals);
        fundamentals_records = records.size();
        frame = merge_fundamentals(frame, std::move(records));
    }

    json violations = json::array();
    for (const auto& d : parsed.stats.ohlc_violations) violations.push_back(d.iso());
    json quality{{"rows_in", parsed.stats.rows_in},
                 {"rows_out", frame.rows()},
                 {"duplicate_dates", parsed.stats.duplicate_dates},
                 {"unparsable_dates", parsed.stats.unparsable_dates},
                 {"coerced_cells", parsed.stats.coerced_cells},
                 {"forward_filled_cells", missing_before - missing_after},
                 {"ohlc_violations", violations},
                 {"fundamentals_records", fundamentals_records},
                 {"columns", frame.column_names()}};

    const fs::path out = resolve_output(a.out);
    run.inputs = {{"ohlcv", a.ohlcv}, {"fundamentals", a.fundamentals}};
    run.config = {{"date_format", a.date_format}, {"date_column", a.date_column}, {"mappings", a.mappings}};
    run.output = out.string();

    ArtifactSet artifacts;
    artifacts.add(out, frame_csv(frame));
    artifacts.add(sidecar(out, ".quality.json"), quality.dump(2) + "\n");
    artifacts.add(sidecar(out, ".run.json"), run.render());
    artifacts.commit();
    spdlog::info("ingest: {} rows in, {} rows out, {} OHLC violations", parsed.stats.rows_in, frame.rows(),
                 parsed.stats.ohlc_violations.size());
    return 0;
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
    std::string in;
    std::string config;
    std::string out;
    std::string corr_out;
    std::string ticker;
};

int cmd_features(const FeaturesArgs& a) {
    RunManifest run;
    run.command = "features";
    run.ticker = a.ticker;
    const auto cfg = load_indicator_config(a.config);
    const SeriesFrame source = read_frame_csv_file(a.in);
    const auto built = indicators::build_feature_frame(source, cfg);
    spdlog::info("features: warm-up trim {} rows, {} rows x {} columns", built.warmup_trimmed, built.frame.rows(),
                 built.frame.cols());

    const fs::path out = resolve_output(a.out);
    json manifest{{"columns", built.frame.column_names()},
                  {"warmup_trimmed", built.warmup_trimmed},
                  {"dropped_columns", built.dropped_columns},
                  {"config", config_to_json(cfg)}};
    run.inputs = {{"frame", a.in}, {"config", a.config}};
    run.config = config_to_json(cfg);
    run.output = out.string();

    ArtifactSet artifacts;
    artifacts.add(out, frame_csv(built.frame));
    artifacts.add(sidecar(out, ".manifest.json"), manifest.dump(2) + "\n");
    if (!a.corr_out.empty()) {
        const auto corr = indicators::pearson_matrix(built.frame, built.frame.column_names());
        std::ostringstream s;
        indicators::write_correlation_csv(s, corr);
        artifacts.add(resolve_output(a.corr_out), s.str());
    }
    artifacts.add(sidecar(out, ".run.json"), run.render());
    artifacts.commit();
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string features;
    std::string out;
    std::string report;
    std::string ticker;
    std::string target = "close";
    TrainConfig config;
    std::uint64_t seed = 42;
    bool no_shuffle = false;
    double clip = 0.0;
};

int cmd_train(TrainArgs a) {
    RunManifest run;
    run.command = "train";
    run.ticker = a.ticker;
    a.config.seed = nn::RngSeed{a.seed};
    a.config.shuffle = !a.no_shuffle;
    if (a.clip > 0.0) a.config.clip_norm = a.clip;
    a.config.validate();

    const SeriesFrame features = read_frame_csv_file(a.features);
    const auto split_spec = a.config.split();
    const auto scaler = fit_minmax(features, split_spec.training_rows(features.rows()));
    const auto scaled = transform(features, scaler);
    const auto windows = make_windows(scaled, a.config.lookback, a.target);

    TrainInputs inputs;
    inputs.data = chronological_split(windows, split_spec);
    inputs.scaler = scaler;
    inputs.manifest = features.column_names();
    inputs.target_column = a.target;
    spdlog::info("train: {} train / {} validation windows, {} features", inputs.data.train.size(),
                 inputs.data.test.size(), features.cols());
    const auto result = train(inputs, a.config);
    spdlog::info("train: best epoch {} (val_loss {}), {:.1f}s", result.report.best_epoch,
                 result.report.best_val_loss, result.report.wall_seconds);

    const fs::path out = resolve_output(a.out);
    const fs::path report = a.report.empty() ? sidecar(out, ".report.csv") : resolve_output(a.report);
    std::ostringstream ck;
    save_checkpoint(result.checkpoint, ck);
    std::ostringstream rep;
    write_report_csv(rep, result.report);

    run.inputs = {{"features", a.features}};
    run.config = {{"epochs", a.config.epochs},
                  {"batch_size", a.config.batch_size},
                  {"lookback", a.config.lookback},
                  {"train_fraction", a.config.train_fraction},
                  {"hidden", {a.config.hidden1, a.config.hidden2}},
                  {"dropout", a.config.dropout_rate},
                  {"shuffle", a.config.shuffle},
                  {"clip_norm", a.clip},
                  {"target", a.target},
                  {"seed", a.seed}};
    run.seed = a.seed;
    run.output = out.string();

    ArtifactSet artifacts;
    artifacts.add(out, ck.str());
    artifacts.add(report, rep.str());
    artifacts.add(sidecar(out, ".run.json"), run.render());
    artifacts.commit();
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string checkpoint;
    std::string features;
    std::string out;
    std::string ticker;
};

int cmd_evaluate(const EvaluateArgs& a) {
    RunManifest run;
    run.command = "evaluate";
    run.ticker = a.ticker;
    const auto checkpoint = load_checkpoint(a.checkpoint);
    const SeriesFrame features = read_frame_csv_file(a.features);
    const auto prepared = prepare_for_checkpoint(checkpoint, features);
    const auto result = evaluate(checkpoint, prepared.split.test, checkpoint.scaler);
    spdlog::info("evaluate: R² = {} over {} test windows", result.r2, result.actual.size());

    const fs::path dir = resolve_output(a.out);
    std::ostringstream csv;
    write_evaluation_csv(csv, result);
    json summary{{"ticker", a.ticker}, {"r2", result.r2}, {"n_test", result.actual.size()}};
    run.inputs = {{"checkpoint", a.checkpoint}, {"features", a.features}};
    run.output = dir.string();

    ArtifactSet artifacts;
    artifacts.add(dir / "evaluation.csv", csv.str());
    artifacts.add(dir / "summary.json", summary.dump(2) + "\n");
    artifacts.add(dir / "run_manifest.json", run.render());
    artifacts.commit();
    return 0;
}

// ---------------------------------------------------------------- forecast

struct ForecastArgs {
    std::string checkpoint;
    std::string features;
    std::string config;
    std::string out;
    std::string ticker;
    long horizon = 0;
};

int cmd_forecast(const ForecastArgs& a) {
    if (a.horizon < 0) throw std::invalid_argument("--horizon must be >= 0");
    RunManifest run;
    run.command = "forecast";
    run.ticker = a.ticker;
    const auto checkpoint = load_checkpoint(a.checkpoint);
    const SeriesFrame features = read_frame_csv_file(a.features);
    const auto cfg = config_from_manifest(checkpoint.manifest, load_indicator_config(a.config));
    const auto path = forecast_recursive(checkpoint, features, static_cast<std::size_t>(a.horizon), cfg);

    const fs::path out = resolve_output(a.out);
    std::ostringstream csv;
    write_forecast_csv(csv, path);
    run.inputs = {{"checkpoint", a.checkpoint}, {"features", a.features}, {"config", a.config}};
    run.config = {{"horizon", a.horizon}, {"indicators", config_to_json(cfg)}};
    run.output = out.string();

    ArtifactSet artifacts;
    artifacts.add(out, csv.str());
    artifacts.add(sidecar(out, ".run.json"), run.render());
    artifacts.commit();
    return 0;
}

// ---------------------------------------------------------------- attribute

struct AttributeArgs {
    std::string checkpoint;
    std::string features;
    std::string sample = "last";
    long steps = 256;
    std::string out;
    std::string ticker;
};

int cmd_attribute(const AttributeArgs& a) {
    if (a.steps < 1) throw std::invalid_argument("--steps must be >= 1");
    RunManifest run;
    run.command = "attribute";
    run.ticker = a.ticker;
    const auto checkpoint = load_checkpoint(a.checkpoint);
    const SeriesFrame features = read_frame_csv_file(a.features);
    const auto prepared = prepare_for_checkpoint(checkpoint, features);
    const auto& test = prepared.split.test;

    std::size_t index = test.size() - 1;
    if (a.sample != "last") {
        std::size_t pos = 0;
        const unsigned long parsed = std::stoul(a.sample, &pos);
        if (pos != a.sample.size()) throw std::invalid_argument("--sample must be 'last' or an index");
        if (parsed >= test.size())
            throw std::invalid_argument("--sample " + a.sample + " out of range (" + std::to_string(test.size()) +
                                        " test windows)");
        index = parsed;
    }
    const auto result = integrated_gradients(checkpoint, test.window(index), static_cast<std::size_t>(a.steps));
    const AttributionResult single[] = {result};
    const auto ranking = aggregate_attribution(single);

    json ranks = json::array();
    for (std::size_t r = 0; r < ranking.size(); ++r)
        ranks.push_back({{"rank", r + 1}, {"feature", ranking[r].feature}, {"mean_abs_attribution", ranking[r].mean_abs}});
    json summary{{"sample_index", index},
                 {"sample_date", test.sample_dates()[index].iso()},
                 {"baseline", result.baseline},
                 {"scheme", result.scheme},
                 {"steps", result.steps},
                 {"output_at_input", result.output_at_input},
                 {"output_at_baseline", result.output_at_baseline},
                 {"attribution_sum", result.attribution_sum},
                 {"completeness_gap", result.completeness_gap},
                 {"relative_completeness_gap", result.relative_completeness_gap},
                 {"ranking", ranks}};

    const fs::path dir = resolve_output(a.out);
    std::ostringstream csv;
    write_attribution_csv(csv, result);
    run.inputs = {{"checkpoint", a.checkpoint}, {"features", a.features}};
    run.config = {{"sample", a.sample}, {"steps", a.steps}};
    run.output = dir.string();

    ArtifactSet artifacts;
    artifacts.add(dir / "attribution.csv", csv.str());
    artifacts.add(dir / "ranking.json", summary.dump(2) + "\n");
    artifacts.add(dir / "run_manifest.json", run.render());
    artifacts.commit();
    return 0;
}

}  // namespace

std::string config_hash(const std::string& canonical_config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run(const std::vector<std::string>& args) {
    static const auto logger = [] {
        auto l = spdlog::stderr_color_mt("tsforecast");
        l->set_pattern("[%l] %v");
        spdlog::set_default_logger(l);
        return l;
    }();
    (void)logger;

    CLI::App app{"Time-series forecasting toolkit: ingest, features, train, evaluate, forecast, attribute"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string ticker;
    app.add_option("--ticker", ticker, "Instrument ticker recorded in run manifests");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse, clean and merge raw OHLCV (+ fundamentals) CSV");
    ingest_cmd->add_option("--ohlcv", ingest.ohlcv, "OHLCV CSV")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--fundamentals", ingest.fundamentals, "Fundamentals CSV")->check(CLI::ExistingFile);
    ingest_cmd->add_option("--out", ingest.out, "Cleaned frame CSV")->default_val(std::string("frame.csv"));
    ingest_cmd->add_option("--date-format", ingest.date_format, "strptime-style date pattern (default ISO-8601)");
    ingest_cmd->add_option("--date-column", ingest.date_column, "Date column header")->default_val("Date");
    ingest_cmd->add_option("--map", ingest.mappings, "Column mapping canonical=Header (repeatable)");

    FeaturesArgs features;
    auto* features_cmd = app.add_subcommand("features", "Engineer indicator features from a cleaned frame");
    features_cmd->add_option("--in", features.in, "Cleaned frame CSV")->required()->check(CLI::ExistingFile);
    features_cmd->add_option("--config", features.config, "Indicator config JSON")->check(CLI::ExistingFile);
    features_cmd->add_option("--out", features.out, "Feature frame CSV")->default_val(std::string("features.csv"));
    features_cmd->add_option("--corr-out", features.corr_out, "Correlation matrix CSV");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train the LSTM and write the best checkpoint");
    train_cmd->add_option("--features", train_args.features, "Feature frame CSV")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--lookback", train_args.config.lookback, "Window length")
        ->default_val(60)
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    train_cmd->add_option("--epochs", train_args.config.epochs, "Training epochs")
        ->default_val(25)
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    train_cmd->add_option("--batch", train_args.config.batch_size, "Mini-batch size")
        ->default_val(32)
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    train_cmd->add_option("--split", train_args.config.train_fraction, "Chronological training fraction")
        ->default_val(0.8)
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--seed", train_args.seed, "Seed for initialization, dropout and shuffling")->default_val(42);
    train_cmd->add_option("--hidden", train_args.config.hidden1, "Units in the first LSTM layer")->default_val(64);
    train_cmd->add_option("--hidden2", train_args.config.hidden2, "Units in the second LSTM layer")->default_val(64);
    train_cmd->add_option("--dropout", train_args.config.dropout_rate, "Dropout rate")->default_val(0.2);
    train_cmd->add_option("--clip-norm", train_args.clip, "Global gradient-norm clip (0 = off)")->default_val(0.0);
    train_cmd->add_flag("--no-shuffle", train_args.no_shuffle, "Keep training batches in chronological order");
    train_cmd->add_option("--target", train_args.target, "Target column")->default_val("close");
    train_cmd->add_option("--out", train_args.out, "Checkpoint path (.tsfck)")->default_val(std::string("model.tsfck"));
    train_cmd->add_option("--report", train_args.report, "Training report CSV (default <out>.report.csv)");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "One-step-ahead R² on the chronological test split");
    eval_cmd->add_option("--checkpoint", eval.checkpoint)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--features", eval.features)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--out", eval.out, "Output directory")->default_val(std::string("evaluation"));

    ForecastArgs fc;
    auto* fc_cmd = app.add_subcommand("forecast", "Recursive multi-step projection of the close");
    fc_cmd->add_option("--checkpoint", fc.checkpoint)->required()->check(CLI::ExistingFile);
    fc_cmd->add_option("--features", fc.features)->required()->check(CLI::ExistingFile);
    fc_cmd->add_option("--horizon", fc.horizon, "Trading days to project")->required();
    fc_cmd->add_option("--config", fc.config, "Indicator config JSON used to build the features")
        ->check(CLI::ExistingFile);
    fc_cmd->add_option("--out", fc.out, "Forecast CSV")->default_val(std::string("forecast.csv"));

    AttributeArgs attr;
    auto* attr_cmd = app.add_subcommand("attribute", "Integrated Gradients attribution for one test window");
    attr_cmd->add_option("--checkpoint", attr.checkpoint)->required()->check(CLI::ExistingFile);
    attr_cmd->add_option("--features", attr.features)->required()->check(CLI::ExistingFile);
    attr_cmd->add_option("--sample", attr.sample, "'last' or a test-window index")->default_val("last");
    attr_cmd->add_option("--steps", attr.steps, "Riemann steps")
        ->default_val(256)
        ->check(CLI::Range(1L, 100000000L));
    attr_cmd->add_option("--out", attr.out, "Output directory")->default_val(std::string("attribution"));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest_cmd) {
            ingest.ticker = ticker;
            return cmd_ingest(ingest);
        }
        if (*features_cmd) {
            features.ticker = ticker;
            return cmd_features(features);
        }
        if (*train_cmd) {
            train_args.ticker = ticker;
            return cmd_train(train_args);
        }
        if (*eval_cmd) {
            eval.ticker = ticker;
            return cmd_evaluate(eval);
        }
        if (*fc_cmd) {
            fc.ticker = ticker;
            return cmd_forecast(fc);
        }
        if (*attr_cmd) {
            attr.ticker = ticker;
            return cmd_attribute(attr);
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 2;
}

}  // namespace tsf::cli
