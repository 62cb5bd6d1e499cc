#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shortclass/corpus.hpp"
#include "shortclass/metrics.hpp"
#include "shortclass/model_io.hpp"
#include "shortclass/tune.hpp"

namespace shortclass::bench {

using nlohmann::json;

struct ExperimentConfig {
    // Exactly one data source: a CSV pair or the synthetic generator.
    std::optional<std::string> data_csv;
    corpus::CsvColumns csv_columns;
    std::optional<std::string> pool_csv;  // positive-only augmentation pool
    std::optional<corpus::SyntheticConfig> synthetic;
    std::size_t synthetic_pool_size = 0;

    std::vector<std::string> methods;
    double test_frac = 0.15;
    double valid_frac_of_train = 0.15;
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> tuning_budget;  // required per method
    std::vector<double> balance_points;                // ascending, in (0,1]
    std::string output_dir = "results";

    std::vector<std::string> lexicon_terms;  // empty = published climate lexicon
    bool stemming = true;
    std::optional<std::string> stopwords_file;  // newline-delimited override
    std::size_t max_len = 24;
    std::size_t nn_epochs = 8;
    std::size_t nn_patience = 2;

    void validate() const;
};

const std::vector<std::string>& all_methods();
bool is_neural_method(const std::string& method);
bool is_supervised_method(const std::string& method);

json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);
std::string config_hash(const ExperimentConfig& config);

tune::SearchSpace method_search_space(const std::string& method,
                                      const ExperimentConfig& config);

struct MethodResult {
    std::string method;
    bool failed = false;
    std::string error;
    metrics::EvaluationReport report;
    std::vector<int> predictions;  // on the shared test set
    tune::ParamMap best_config;
    std::vector<tune::Trial> trials;
    // fingerprint of the index set the final vocabulary was fitted on;
    // must equal train+valid, never the whole dataset
    std::string vocab_fingerprint;
};

struct RunResult {
    std::vector<MethodResult> methods;  // sorted by F1 descending
    std::vector<int> y_true;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::uint64_t dataset_fingerprint = 0;
    std::uint64_t test_fingerprint = 0;
};

// Tune on train/valid, retrain the winner on train+valid, evaluate once on
// the shared test set. A method that throws is marked failed, not fatal.
RunResult run_benchmark(const ExperimentConfig& config);

RunResult run_on(const ExperimentConfig& config, const corpus::Dataset& dataset,
                 const corpus::DataSplit& split);

struct SweepPoint {
    double ratio = 0.0;
    bool reachable = true;
    RunResult result;
};

std::vector<SweepPoint> balance_sweep(const ExperimentConfig& config);

struct McNemarMatrix {
    std::vector<std::string> methods;
    // unset: diagonal or missing predictions. Zero discordants off-diagonal
    // reports mu=0, p=1.
    std::vector<std::vector<std::optional<metrics::McNemarResult>>> cells;
};

McNemarMatrix pairwise_mcnemar(const RunResult& result);

// report.json is fully deterministic: wall-clock timings are written to
// timings.json instead so identical (config, seed) runs are byte-identical.
json run_result_to_json(const RunResult& result);
RunResult run_result_from_json(const json& j);

std::string results_dir(const ExperimentConfig& config);  // <output_dir>/<hash>
void emit_report(const RunResult& result, const std::string& dir, const std::string& format);
void emit_timings(const RunResult& result, const std::string& dir);
void emit_trials(const RunResult& result, const std::string& dir);
void emit_mcnemar(const McNemarMatrix& matrix, const std::string& dir);
void emit_sweep_csv(const std::vector<SweepPoint>& sweep, const std::string& dir);

// Fit one method with explicit hyperparameters (the CLI `train` path).
model_io::TrainedMethod fit_method(const std::string& method, const tune::ParamMap& params,
                                   const ExperimentConfig& config,
                                   const std::vector<textprep::TokenList>& train_raw_tokens,
                                   const std::vector<int>& train_y,
                                   const std::vector<textprep::TokenList>& valid_raw_tokens,
                                   const std::vector<int>& valid_y,
                                   std::uint64_t vocab_fingerprint);

}  // namespace shortclass::bench
