#include "shortclass/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "shortclass/classic.hpp"
#include "shortclass/common.hpp"
#include "shortclass/neural.hpp"

namespace shortclass::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::uint64_t index_set_fingerprint(std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    return fnv1a64(indices.data(), indices.size() * sizeof(std::size_t));
}

double get_real(const tune::ParamMap& p, const std::string& name, double fallback) {
    auto it = p.find(name);
    if (it == p.end()) return fallback;
    if (it->second.type == tune::ParamValue::Type::integer)
        return static_cast<double>(it->second.integer);
    return it->second.real;
}

long long get_int(const tune::ParamMap& p, const std::string& name, long long fallback) {
    auto it = p.find(name);
    if (it == p.end()) return fallback;
    if (it->second.type == tune::ParamValue::Type::real)
        return static_cast<long long>(std::llround(it->second.real));
    return it->second.integer;
}

std::string get_cat(const tune::ParamMap& p, const std::string& name,
                    const std::string& fallback) {
    auto it = p.find(name);
    if (it == p.end()) return fallback;
    return it->second.categorical;
}

}  // namespace

const std::vector<std::string>& all_methods() {
    static const std::vector<std::string> methods = {
        "lexicon", "logreg", "svm", "nb", "knn", "rf", "fcnn", "cnn", "lstm"};
    return methods;
}

bool is_neural_method(const std::string& method) {
    return method == "fcnn" || method == "cnn" || method == "lstm";
}

bool is_supervised_method(const std::string& method) { return method != "lexicon"; }

void ExperimentConfig::validate() const {
    if (methods.empty()) throw DataError("config: method list is empty");
    for (const auto& m : methods)
        if (std::find(all_methods().begin(), all_methods().end(), m) == all_methods().end())
            throw DataError("config: unknown method '" + m + "'");
    if (!data_csv && !synthetic)
        throw DataError("config: need either data_csv or synthetic settings");
    if (data_csv && synthetic)
        throw DataError("config: data_csv and synthetic are mutually exclusive");
    if (test_frac <= 0.0 || test_frac >= 1.0 || valid_frac_of_train <= 0.0 ||
        valid_frac_of_train >= 1.0)
        throw DataError("config: split fractions must lie in (0, 1)");
    for (const auto& m : methods)
        if (!tuning_budget.count(m) || tuning_budget.at(m) == 0)
            throw DataError("config: tuning budget for '" + m +
                            "' is required (no silent default)");
    double prev = 0.0;
    for (double r : balance_points) {
        if (r <= 0.0 || r > 1.0) throw DataError("config: balance ratios must lie in (0, 1]");
        if (r <= prev) throw DataError("config: balance ratios must be ascending");
        prev = r;
    }
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    if (c.data_csv) {
        j["data_csv"] = *c.data_csv;
        j["csv_columns"] = {{"text", c.csv_columns.text_column},
                            {"label", c.csv_columns.label_column}};
        if (c.csv_columns.id_column) j["csv_columns"]["id"] = *c.csv_columns.id_column;
        if (c.csv_columns.label2_column)
            j["csv_columns"]["label2"] = *c.csv_columns.label2_column;
    }
    if (c.pool_csv) j["pool_csv"] = *c.pool_csv;
    if (c.synthetic) {
        j["synthetic"] = {{"n", c.synthetic->n},
                          {"ratio", c.synthetic->ratio},
                          {"topic_terms", c.synthetic->topic_terms},
                          {"noise_vocab_size", c.synthetic->noise_vocab_size},
                          {"seed", c.synthetic->seed}};
        j["synthetic_pool_size"] = c.synthetic_pool_size;
    }
    j["methods"] = c.methods;
    j["test_frac"] = c.test_frac;
    j["valid_frac_of_train"] = c.valid_frac_of_train;
    j["seed"] = c.seed;
    j["tuning_budget"] = c.tuning_budget;
    j["balance_points"] = c.balance_points;
    j["output_dir"] = c.output_dir;
    j["lexicon_terms"] = c.lexicon_terms;
    j["stemming"] = c.stemming;
    if (c.stopwords_file) j["stopwords_file"] = *c.stopwords_file;
    j["max_len"] = c.max_len;
    j["nn_epochs"] = c.nn_epochs;
    j["nn_patience"] = c.nn_patience;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("data_csv")) {
        c.data_csv = j.at("data_csv").get<std::string>();
        if (j.contains("csv_columns")) {
            const auto& cc = j.at("csv_columns");
            if (cc.contains("text")) c.csv_columns.text_column = cc.at("text").get<std::string>();
            if (cc.contains("label"))
                c.csv_columns.label_column = cc.at("label").get<std::string>();
            if (cc.contains("id")) c.csv_columns.id_column = cc.at("id").get<std::string>();
            if (cc.contains("label2"))
                c.csv_columns.label2_column = cc.at("label2").get<std::string>();
        }
    }
    if (j.contains("pool_csv")) c.pool_csv = j.at("pool_csv").get<std::string>();
    if (j.contains("synthetic")) {
        corpus::SyntheticConfig s;
        const auto& sj = j.at("synthetic");
        s.n = sj.at("n").get<std::size_t>();
        s.ratio = sj.at("ratio").get<double>();
        s.topic_terms = sj.at("topic_terms").get<std::vector<std::string>>();
        if (sj.contains("noise_vocab_size"))
            s.noise_vocab_size = sj.at("noise_vocab_size").get<std::size_t>();
        if (sj.contains("seed")) s.seed = sj.at("seed").get<std::uint64_t>();
        c.synthetic = s;
        if (j.contains("synthetic_pool_size"))
            c.synthetic_pool_size = j.at("synthetic_pool_size").get<std::size_t>();
    }
    c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("test_frac")) c.test_frac = j.at("test_frac").get<double>();
    if (j.contains("valid_frac_of_train"))
        c.valid_frac_of_train = j.at("valid_frac_of_train").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tuning_budget"))
        c.tuning_budget = j.at("tuning_budget").get<std::map<std::string, std::size_t>>();
    if (j.contains("balance_points"))
        c.balance_points = j.at("balance_points").get<std::vector<double>>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("lexicon_terms"))
        c.lexicon_terms = j.at("lexicon_terms").get<std::vector<std::string>>();
    if (j.contains("stemming")) c.stemming = j.at("stemming").get<bool>();
    if (j.contains("stopwords_file"))
        c.stopwords_file = j.at("stopwords_file").get<std::string>();
    if (j.contains("max_len")) c.max_len = j.at("max_len").get<std::size_t>();
    if (j.contains("nn_epochs")) c.nn_epochs = j.at("nn_epochs").get<std::size_t>();
    if (j.contains("nn_patience")) c.nn_patience = j.at("nn_patience").get<std::size_t>();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed config JSON in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
    // the output location is not part of the experiment's identity
    json j = config_to_json(config);
    j.erase("output_dir");
    return hex64(fnv1a64(j.dump()));
}

tune::SearchSpace method_search_space(const std::string& method,
                                      const ExperimentConfig&) {
    using tune::ParamSpec;
    tune::SearchSpace s;
    auto add_vectorizer = [&](long long max_feat_hi) {
        s.params["representation"] = ParamSpec::categorical({"counts", "tfidf"});
        s.params["max_features"] = ParamSpec::integer_range(200, max_feat_hi);
    };
    if (method == "lexicon") {
        s.params["min_matches"] = ParamSpec::integer_range(1, 2);
    } else if (method == "logreg") {
        add_vectorizer(1200);
        s.params["learning_rate"] = ParamSpec::log_uniform(0.1, 5.0);
        s.params["l2_strength"] = ParamSpec::log_uniform(1e-6, 1e-2);
    } else if (method == "svm") {
        add_vectorizer(1200);
        s.params["C"] = ParamSpec::log_uniform(0.01, 100.0);
        s.params["epochs"] = ParamSpec::integer_range(3, 12);
    } else if (method == "nb") {
        s.params["max_features"] = ParamSpec::integer_range(200, 1200);
        s.params["alpha"] = ParamSpec::log_uniform(0.01, 10.0);
    } else if (method == "knn") {
        s.params["representation"] = ParamSpec::categorical({"counts", "tfidf"});
        s.params["max_features"] = ParamSpec::integer_range(100, 600);
        s.params["k_index"] = ParamSpec::integer_range(0, 12);  // k = 2*k_index + 1
        s.params["leaf_size"] = ParamSpec::integer_range(10, 100);
    } else if (method == "rf") {
        // depth must clear the planted-term disjunction; sqrt(M) candidate
        // sampling keeps per-node coverage low, so small vocabularies win
        s.params["representation"] = ParamSpec::categorical({"counts", "tfidf"});
        s.params["max_features"] = ParamSpec::integer_range(100, 300);
        s.params["n_trees"] = ParamSpec::integer_range(20, 40);
        s.params["max_depth"] = ParamSpec::integer_range(12, 16);
    } else if (is_neural_method(method)) {
        s.params["max_vocab"] = ParamSpec::integer_range(300, 1200);
        s.params["embedding_dim"] = ParamSpec::integer_range(16, 32);
        s.params["dropout_rate"] = ParamSpec::uniform(0.0, 0.4);
        s.params["learning_rate"] = ParamSpec::log_uniform(1e-3, 1e-2);
        s.params["batch_size"] = ParamSpec::categorical({"32", "64"});
        s.params["l2_strength"] = ParamSpec::log_uniform(1e-8, 1e-4);
        if (method == "fcnn") {
            s.params["units"] = ParamSpec::integer_range(16, 32);
        } else if (method == "cnn") {
            s.params["filters"] = ParamSpec::integer_range(16, 32);
            s.params["kernel_size"] = ParamSpec::integer_range(2, 5);
        } else {
            s.params["units"] = ParamSpec::integer_range(16, 24);
            s.params["layer_dropout"] = ParamSpec::uniform(0.0, 0.3);
            s.params["bidirectional"] = ParamSpec::categorical({"no", "yes"});
        }
    } else {
        throw DataError("unknown method: " + method);
    }
    return s;
}

namespace {

std::vector<textprep::TokenList> stem_all(const std::vector<textprep::TokenList>& tokens) {
    std::vector<textprep::TokenList> out(tokens.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(tokens.size()); ++i)
        out[static_cast<std::size_t>(i)] = textprep::stem_tokens(tokens[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

model_io::TrainedMethod fit_method_timed(
    const std::string& method, const tune::ParamMap& params, const ExperimentConfig& config,
    const std::vector<textprep::TokenList>& train_raw, const std::vector<int>& train_y,
    const std::vector<textprep::TokenList>& valid_raw, const std::vector<int>& valid_y,
    std::uint64_t vocab_fingerprint, double* train_seconds) {
    model_io::TrainedMethod tm;
    tm.method = method;
    tm.prep = textprep::PrepConfig::defaults();
    tm.prep.stemming = config.stemming;
    if (config.stopwords_file)
        tm.prep.stopwords = textprep::load_stopwords_file(*config.stopwords_file);
    tm.hyperparameters = model_io::param_map_to_json(params);
    const std::uint64_t fit_seed = derive_seed(config.seed, fnv1a64(method));

    if (method == "lexicon") {
        classic::Lexicon lex = classic::published_lexicon();
        if (!config.lexicon_terms.empty()) {
            lex.key_terms.clear();
            lex.key_terms.insert(config.lexicon_terms.begin(), config.lexicon_terms.end());
        }
        lex.min_matches = static_cast<std::size_t>(get_int(params, "min_matches", 1));
        auto t0 = Clock::now();
        tm.classic_model = std::make_shared<classic::LexiconModel>(std::move(lex));
        if (train_seconds) *train_seconds = seconds_since(t0);
        return tm;
    }

    const std::vector<textprep::TokenList>* train_tokens = &train_raw;
    std::vector<textprep::TokenList> train_stemmed;
    if (config.stemming) {
        train_stemmed = stem_all(train_raw);
        train_tokens = &train_stemmed;
    }

    if (is_neural_method(method)) {
        neural::NetConfig nc;
        nc.max_vocab = static_cast<std::size_t>(get_int(params, "max_vocab", 1000));
        nc.embedding_dim = static_cast<std::size_t>(get_int(params, "embedding_dim", 16));
        nc.units = static_cast<std::size_t>(get_int(params, "units", 16));
        nc.filters = static_cast<std::size_t>(get_int(params, "filters", 16));
        nc.kernel_size = static_cast<std::size_t>(get_int(params, "kernel_size", 3));
        nc.dropout_rate = get_real(params, "dropout_rate", 0.2);
        nc.layer_dropout = get_real(params, "layer_dropout", 0.0);
        nc.learning_rate = get_real(params, "learning_rate", 1e-2);
        nc.batch_size = static_cast<std::size_t>(
            std::stoll(get_cat(params, "batch_size", "32")));
        nc.l2_strength = get_real(params, "l2_strength", 0.0);
        nc.epochs = static_cast<std::size_t>(get_int(params, "epochs",
                                                     static_cast<long long>(config.nn_epochs)));
        nc.patience = config.nn_patience;
        nc.max_len = config.max_len;
        nc.bidirectional = get_cat(params, "bidirectional", "no") == "yes";
        nc.seed = fit_seed;

        auto vocab = vectorize::build_vocab(*train_tokens, nc.max_vocab, vocab_fingerprint);
        auto train_seq = vectorize::sequence_batch(*train_tokens, vocab, nc.max_len);
        const std::vector<textprep::TokenList>* valid_tokens = &valid_raw;
        std::vector<textprep::TokenList> valid_stemmed;
        if (config.stemming) {
            valid_stemmed = stem_all(valid_raw);
            valid_tokens = &valid_stemmed;
        }
        auto valid_seq = vectorize::sequence_batch(*valid_tokens, vocab, nc.max_len);

        auto t0 = Clock::now();
        tm.net = neural::train_net(neural::arch_from_string(method), train_seq, train_y,
                                   valid_seq, valid_y, nc);
        if (train_seconds) *train_seconds = seconds_since(t0);
        tm.vocab = std::move(vocab);
        tm.max_len = nc.max_len;
        return tm;
    }

    // Traditional vector-space classifiers. Counts are the untuned default:
    // full-batch descent moves much faster on raw counts than on unit rows.
    std::string fallback_rep = method == "knn" ? "tfidf" : "counts";
    std::string rep = method == "nb" ? "counts"
                                     : get_cat(params, "representation", fallback_rep);
    auto max_features = static_cast<std::size_t>(get_int(params, "max_features", 1000));
    auto vocab = vectorize::build_vocab(*train_tokens, max_features, vocab_fingerprint);
    auto counts = vectorize::count_matrix(*train_tokens, vocab);
    vectorize::FeatureMatrix features;
    if (rep == "tfidf") {
        features = vectorize::tfidf_transform(counts, vocab);
        tm.rep = vectorize::Representation::tfidf;
    } else {
        features = std::move(counts);
        tm.rep = vectorize::Representation::counts;
    }

    auto t0 = Clock::now();
    if (method == "logreg") {
        classic::LogRegConfig lc;
        lc.learning_rate = get_real(params, "learning_rate", 2.0);
        lc.l2_strength = get_real(params, "l2_strength", 1e-5);
        lc.max_iter = static_cast<std::size_t>(get_int(params, "max_iter", 500));
        lc.tol = get_real(params, "tol", 1e-8);
        lc.seed = fit_seed;
        tm.classic_model = classic::train_logreg(features, train_y, lc);
    } else if (method == "svm") {
        classic::SvmConfig sc;
        sc.c = get_real(params, "C", 1.0);
        sc.epochs = static_cast<std::size_t>(get_int(params, "epochs", 8));
        sc.seed = fit_seed;
        tm.classic_model = classic::train_linear_svm(features, train_y, sc);
    } else if (method == "nb") {
        tm.classic_model = classic::train_multinomial_nb(features, train_y, get_real(params, "alpha", 1.0));
    } else if (method == "knn") {
        auto k = static_cast<std::size_t>(2 * get_int(params, "k_index", 2) + 1);
        auto leaf = static_cast<std::size_t>(get_int(params, "leaf_size", 30));
        tm.classic_model = std::make_shared<classic::KnnModel>(features, train_y, k, leaf);
    } else if (method == "rf") {
        classic::RandomForestConfig rc;
        rc.n_trees = static_cast<std::size_t>(get_int(params, "n_trees", 50));
        rc.max_depth = static_cast<std::size_t>(get_int(params, "max_depth", 10));
        rc.seed = fit_seed;
        tm.classic_model = classic::train_random_forest(features, train_y, rc);
    } else {
        throw DataError("unknown method: " + method);
    }
    if (train_seconds) *train_seconds = seconds_since(t0);
    tm.vocab = std::move(vocab);
    return tm;
}

model_io::TrainedMethod fit_method(const std::string& method, const tune::ParamMap& params,
                                   const ExperimentConfig& config,
                                   const std::vector<textprep::TokenList>& train_raw_tokens,
                                   const std::vector<int>& train_y,
                                   const std::vector<textprep::TokenList>& valid_raw_tokens,
                                   const std::vector<int>& valid_y,
                                   std::uint64_t vocab_fingerprint) {
    return fit_method_timed(method, params, config, train_raw_tokens, train_y,
                            valid_raw_tokens, valid_y, vocab_fingerprint, nullptr);
}

namespace {

struct PreparedRun {
    std::vector<textprep::TokenList> raw_tokens;  // cleaned, unstemmed
    std::vector<int> labels;
};

PreparedRun tokenize_dataset(const corpus::Dataset& ds, const ExperimentConfig& config) {
    PreparedRun out;
    textprep::PrepConfig prep = textprep::PrepConfig::defaults();
    if (config.stopwords_file)
        prep.stopwords = textprep::load_stopwords_file(*config.stopwords_file);
    prep.stemming = false;
    out.raw_tokens.resize(ds.size());
    out.labels.resize(ds.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(ds.size()); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out.raw_tokens[idx] = textprep::clean_and_tokenize(ds.documents[idx].raw_text, prep);
        out.labels[idx] = ds.documents[idx].label;
    }
    return out;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& items, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(items[i]);
    return out;
}

corpus::Dataset load_or_generate(const ExperimentConfig& config) {
    if (config.data_csv) return corpus::load_csv(*config.data_csv, config.csv_columns);
    return corpus::generate_synthetic(*config.synthetic);
}

}  // namespace

RunResult run_on(const ExperimentConfig& config, const corpus::Dataset& dataset,
                 const corpus::DataSplit& split) {
    config.validate();
    PreparedRun prep = tokenize_dataset(dataset, config);

    auto train_raw = gather(prep.raw_tokens, split.train);
    auto valid_raw = gather(prep.raw_tokens, split.valid);
    auto test_raw = gather(prep.raw_tokens, split.test);
    auto train_y = gather(prep.labels, split.train);
    auto valid_y = gather(prep.labels, split.valid);
    auto test_y = gather(prep.labels, split.test);

    std::vector<std::size_t> combined_idx = split.train;
    combined_idx.insert(combined_idx.end(), split.valid.begin(), split.valid.end());
    const std::uint64_t train_fp = split.train_fingerprint();
    const std::uint64_t combined_fp = index_set_fingerprint(combined_idx);

    auto combined_raw = train_raw;
    combined_raw.insert(combined_raw.end(), valid_raw.begin(), valid_raw.end());
    auto combined_y = train_y;
    combined_y.insert(combined_y.end(), valid_y.begin(), valid_y.end());

    RunResult result;
    result.y_true = test_y;
    result.seed = config.seed;
    result.config_hash = config_hash(config);
    result.dataset_fingerprint = dataset.fingerprint();
    result.test_fingerprint = split.test_fingerprint();

    for (const auto& method : config.methods) {
        MethodResult mr;
        mr.method = method;
        try {
            tune::SearchSpace space = method_search_space(method, config);
            const std::size_t budget = config.tuning_budget.at(method);
            // The objective closure sees train+valid only; the test set is
            // unreachable from any tuning path.
            tune::ObjectiveFn objective = [&](const tune::ParamMap& params) {
                tune::TrialOutcome out;
                try {
                    double secs = 0.0;
                    auto tm = fit_method_timed(method, params, config, train_raw, train_y,
                                               valid_raw, valid_y, train_fp, &secs);
                    auto pred = tm.predict_tokens(valid_raw);
                    auto rep = metrics::compute_report(valid_y, pred.labels, pred.scores);
                    out.objective = rep.f1;
                    out.train_time_s = secs;
                } catch (const std::exception&) {
                    out.failed = true;
                    out.objective = -std::numeric_limits<double>::infinity();
                }
                return out;
            };
            const std::size_t n_startup = std::min<std::size_t>(10, budget / 2);
            auto tuned = tune::tune(space, objective, budget, n_startup,
                                    derive_seed(config.seed, fnv1a64(method)));

            // Objective ties are re-broken by trial order instead of wall
            // clock so identical (config, seed) runs emit identical reports.
            const tune::Trial* winner = nullptr;
            for (const auto& t : tuned.history) {
                if (t.failed) continue;
                if (!winner || t.objective > winner->objective) winner = &t;
            }
            if (!winner) throw NumericError("all tuning trials failed");

            // Retrain the winning config on train+valid, then the one test pass.
            double train_secs = 0.0;
            auto tm = fit_method_timed(method, winner->config, config, combined_raw,
                                       combined_y, valid_raw, valid_y, combined_fp,
                                       &train_secs);
            auto t0 = Clock::now();
            auto pred = tm.predict_tokens(test_raw);
            double exec_secs = seconds_since(t0);

            mr.report = metrics::compute_report(test_y, pred.labels, pred.scores);
            mr.report.training_time_s = train_secs;
            mr.report.execution_time_s = exec_secs;
            mr.predictions = pred.labels;
            mr.best_config = winner->config;
            mr.trials = tuned.history;
            if (tm.vocab) mr.vocab_fingerprint = hex64(tm.vocab->fit_fingerprint);
        } catch (const std::exception& e) {
            mr.failed = true;
            mr.error = e.what();
        }
        result.methods.push_back(std::move(mr));
    }

    std::stable_sort(result.methods.begin(), result.methods.end(),
                     [](const MethodResult& a, const MethodResult& b) {
                         if (a.failed != b.failed) return !a.failed;
                         return a.report.f1 > b.report.f1;
                     });
    return result;
}

RunResult run_benchmark(const ExperimentConfig& config) {
    config.validate();
    corpus::Dataset dataset = load_or_generate(config);
    corpus::DataSplit split = corpus::stratified_split(dataset, config.test_frac,
                                                       config.valid_frac_of_train, config.seed);
    return run_on(config, dataset, split);
}

std::vector<SweepPoint> balance_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.balance_points.empty())
        throw DataError("balance_sweep: config has no balance points");

    corpus::Dataset dataset = load_or_generate(config);
    corpus::DataSplit split = corpus::stratified_split(dataset, config.test_frac,
                                                       config.valid_frac_of_train, config.seed);

    corpus::Dataset pool;
    if (config.pool_csv) {
        pool = corpus::load_csv(*config.pool_csv, config.csv_columns);
        for (auto& d : pool.documents) d.source = corpus::DocSource::augmentation_pool;
    } else if (config.synthetic) {
        std::size_t pool_size = config.synthetic_pool_size;
        if (pool_size == 0)
            pool_size = dataset.negative_count - dataset.positive_count + 8;
        pool = corpus::generate_positive_pool(pool_size, *config.synthetic);
    } else {
        throw DataError("balance_sweep: no augmentation pool configured");
    }

    const double base_ratio = corpus::balance_ratio(dataset);
    std::vector<SweepPoint> sweep;
    for (std::size_t i = 0; i < config.balance_points.size(); ++i) {
        const double ratio = config.balance_points[i];
        SweepPoint point;
        point.ratio = ratio;
        try {
            if (std::abs(ratio - base_ratio) < 0.005) {
                point.result = run_on(config, dataset, split);
            } else {
                auto rebalanced = corpus::rebalance(dataset, split, pool, ratio,
                                                    derive_seed(config.seed, 0x3e9 + i));
                point.result = run_on(config, rebalanced.dataset, rebalanced.split);
            }
        } catch (const DataError& e) {
            point.reachable = false;  // pool exhausted: mark and continue
            (void)e;
        }
        sweep.push_back(std::move(point));
    }
    return sweep;
}

McNemarMatrix pairwise_mcnemar(const RunResult& result) {
    McNemarMatrix matrix;
    std::vector<const MethodResult*> methods;
    for (const auto& m : result.methods) {
        if (m.failed) continue;
        if (m.predictions.size() != result.y_true.size())
            throw DataError("pairwise_mcnemar: missing predictions for " + m.method);
        matrix.methods.push_back(m.method);
        methods.push_back(&m);
    }
    if (methods.size() < 2)
        throw DataError("pairwise_mcnemar: need at least two methods with predictions");

    const std::size_t n = methods.size();
    matrix.cells.assign(n, std::vector<std::optional<metrics::McNemarResult>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;  // no-discordants marker on the diagonal
            auto table = metrics::contingency_table(result.y_true, methods[i]->predictions,
                                                    methods[j]->predictions);
            if (table.n01 + table.n10 == 0) {
                // identical error patterns: trivially indistinguishable
                metrics::McNemarResult r;
                r.statistic = 0.0;
                r.p_value = 1.0;
                r.reject_at_0_05 = false;
                matrix.cells[i][j] = r;
            } else {
                matrix.cells[i][j] = metrics::mcnemar_test(table);
            }
        }
    }
    return matrix;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

json report_to_json(const metrics::EvaluationReport& r) {
    // no timing fields here: report.json must be byte-stable across reruns
    return json{{"accuracy", r.accuracy},
                {"precision", r.precision},
                {"recall", r.recall},
                {"f1", r.f1},
                {"roc_auc", r.roc_auc},
                {"pr_auc", r.pr_auc},
                {"mcc", r.mcc},
                {"precision_degenerate", r.precision_degenerate},
                {"recall_degenerate", r.recall_degenerate},
                {"f1_degenerate", r.f1_degenerate}};
}

metrics::EvaluationReport report_from_json(const json& j) {
    metrics::EvaluationReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.roc_auc = j.at("roc_auc").get<double>();
    r.pr_auc = j.at("pr_auc").get<double>();
    r.mcc = j.at("mcc").get<double>();
    r.precision_degenerate = j.at("precision_degenerate").get<bool>();
    r.recall_degenerate = j.at("recall_degenerate").get<bool>();
    r.f1_degenerate = j.at("f1_degenerate").get<bool>();
    return r;
}

}  // namespace

json run_result_to_json(const RunResult& result) {
    json methods = json::array();
    for (const auto& m : result.methods) {
        json mj;
        mj["method"] = m.method;
        mj["failed"] = m.failed;
        mj["error"] = m.error;
        mj["report"] = report_to_json(m.report);
        mj["predictions"] = m.predictions;
        mj["best_config"] = model_io::param_map_to_json(m.best_config);
        mj["vocab_fingerprint"] = m.vocab_fingerprint;
        methods.push_back(std::move(mj));
    }
    return json{{"format_version", 1},
                {"seed", result.seed},
                {"config_hash", result.config_hash},
                {"dataset_fingerprint", hex64(result.dataset_fingerprint)},
                {"test_fingerprint", hex64(result.test_fingerprint)},
                {"y_true", result.y_true},
                {"methods", methods}};
}

RunResult run_result_from_json(const json& j) {
    RunResult result;
    result.seed = j.at("seed").get<std::uint64_t>();
    result.config_hash = j.at("config_hash").get<std::string>();
    result.dataset_fingerprint =
        std::stoull(j.at("dataset_fingerprint").get<std::string>(), nullptr, 16);
    result.test_fingerprint =
        std::stoull(j.at("test_fingerprint").get<std::string>(), nullptr, 16);
    result.y_true = j.at("y_true").get<std::vector<int>>();
    for (const auto& mj : j.at("methods")) {
        MethodResult m;
        m.method = mj.at("method").get<std::string>();
        m.failed = mj.at("failed").get<bool>();
        m.error = mj.at("error").get<std::string>();
        m.report = report_from_json(mj.at("report"));
        m.predictions = mj.at("predictions").get<std::vector<int>>();
        m.best_config = model_io::param_map_from_json(mj.at("best_config"));
        m.vocab_fingerprint = mj.at("vocab_fingerprint").get<std::string>();
        result.methods.push_back(std::move(m));
    }
    return result;
}

std::string results_dir(const ExperimentConfig& config) {
    return config.output_dir + "/" + config_hash(config);
}

namespace {

const char* kTableHeader = "Method,Accuracy,Precision,Recall,F1 score,AUC ROC,AUC PR,MCC";

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("unwritable output path: " + path);
    out << content;
}

}  // namespace

void emit_report(const RunResult& result, const std::string& dir, const std::string& format) {
    if (format == "json") {
        write_file(dir + "/report.json", run_result_to_json(result).dump(2) + "\n");
        return;
    }
    if (format == "csv") {
        std::string csv = std::string(kTableHeader) + "\n";
        for (const auto& m : result.methods) {
            if (m.failed) {
                csv += m.method + ",,,,,,,\n";
                continue;
            }
            const auto& r = m.report;
            csv += m.method + "," + fmt6(r.accuracy) + "," + fmt6(r.precision) + "," +
                   fmt6(r.recall) + "," + fmt6(r.f1) + "," + fmt6(r.roc_auc) + "," +
                   fmt6(r.pr_auc) + "," + fmt6(r.mcc) + "\n";
        }
        write_file(dir + "/report.csv", csv);
        return;
    }
    if (format == "md") {
        std::string md = "# Benchmark report\n\n";
        md += "| Method | Accuracy | Precision | Recall | F1 score | AUC ROC | AUC PR | MCC |\n";
        md += "|---|---|---|---|---|---|---|---|\n";
        for (const auto& m : result.methods) {
            if (m.failed) {
                md += "| " + m.method + " | failed |  |  |  |  |  |  |\n";
                continue;
            }
            const auto& r = m.report;
            md += "| " + m.method + " | " + fmt6(r.accuracy) + " | " + fmt6(r.precision) +
                  " | " + fmt6(r.recall) + " | **" + fmt6(r.f1) + "** | " + fmt6(r.roc_auc) +
                  " | " + fmt6(r.pr_auc) + " | " + fmt6(r.mcc) + " |\n";
        }
        md += "\nSorted by F1 score.\n\n";
        md += "## Training and execution times\n\n";
        md += "| Method | Training time [s] | Execution time [s] |\n|---|---|---|\n";
        std::vector<const MethodResult*> by_time;
        for (const auto& m : result.methods)
            if (!m.failed) by_time.push_back(&m);
        std::stable_sort(by_time.begin(), by_time.end(),
                         [](const MethodResult* a, const MethodResult* b) {
                             return a->report.training_time_s < b->report.training_time_s;
                         });
        for (const auto* m : by_time)
            md += "| " + m->method + " | " + fmt6(m->report.training_time_s) + " | " +
                  fmt6(m->report.execution_time_s) + " |\n";
        write_file(dir + "/report.md", md);
        return;
    }
    throw UsageError("unknown report format: " + format);
}

void emit_timings(const RunResult& result, const std::string& dir) {
    json t = json::object();
    for (const auto& m : result.methods) {
        if (m.failed) continue;
        t[m.method] = {{"training_time_s", m.report.training_time_s},
                       {"execution_time_s", m.report.execution_time_s}};
    }
    write_file(dir + "/timings.json", t.dump(2) + "\n");
}

void emit_trials(const RunResult& result, const std::string& dir) {
    std::string lines;
    for (const auto& m : result.methods) {
        for (std::size_t i = 0; i < m.trials.size(); ++i) {
            const auto& t = m.trials[i];
            json j{{"method", m.method},
                   {"trial", i},
                   {"objective", t.objective},
                   {"train_time_s", t.train_time_s},
                   {"failed", t.failed},
                   {"config", model_io::param_map_to_json(t.config)}};
            lines += j.dump() + "\n";
        }
    }
    write_file(dir + "/trials.jsonl", lines);
}

void emit_mcnemar(const McNemarMatrix& matrix, const std::string& dir) {
    json stat = json::array(), pval = json::array(), rej = json::array();
    for (const auto& row : matrix.cells) {
        json s = json::array(), p = json::array(), r = json::array();
        for (const auto& cell : row) {
            if (cell) {
                s.push_back(cell->statistic);
                p.push_back(cell->p_value);
                r.push_back(cell->reject_at_0_05);
            } else {
                s.push_back(nullptr);
                p.push_back(nullptr);
                r.push_back(nullptr);
            }
        }
        stat.push_back(s);
        pval.push_back(p);
        rej.push_back(r);
    }
    json j{{"methods", matrix.methods},
           {"statistic", stat},
           {"p_value", pval},
           {"reject_at_0_05", rej},
           {"threshold", 3.841}};
    write_file(dir + "/mcnemar.json", j.dump(2) + "\n");
}

void emit_sweep_csv(const std::vector<SweepPoint>& sweep, const std::string& dir) {
    std::string csv = "ratio,method,f1,status\n";
    for (const auto& point : sweep) {
        if (!point.reachable) {
            csv += fmt6(point.ratio) + ",,,unreachable\n";
            continue;
        }
        for (const auto& m : point.result.methods) {
            if (m.failed)
                csv += fmt6(point.ratio) + "," + m.method + ",,failed\n";
            else
                csv += fmt6(point.ratio) + "," + m.method + "," + fmt6(m.report.f1) + ",ok\n";
        }
    }
    write_file(dir + "/sweep.csv", csv);
}

}  // namespace shortclass::bench
