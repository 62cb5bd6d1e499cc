#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "shortclass/bench.hpp"
#include "shortclass/classic.hpp"
#include "shortclass/common.hpp"
#include "shortclass/corpus.hpp"
#include "shortclass/metrics.hpp"
#include "shortclass/model_io.hpp"

using namespace shortclass;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out = "out";
    std::string format = "table";  // table | json
    int workers = 1;
};

json report_json(const metrics::EvaluationReport& r) {
    return json{{"accuracy", r.accuracy}, {"precision", r.precision},
                {"recall", r.recall},     {"f1", r.f1},
                {"roc_auc", r.roc_auc},   {"pr_auc", r.pr_auc},
                {"mcc", r.mcc}};
}

void print_report(const metrics::EvaluationReport& r, const std::string& format) {
    if (format == "json") {
        std::cout << report_json(r).dump(2) << "\n";
        return;
    }
    std::printf("accuracy   %.6f\n", r.accuracy);
    std::printf("precision  %.6f%s\n", r.precision, r.precision_degenerate ? " (degenerate)" : "");
    std::printf("recall     %.6f%s\n", r.recall, r.recall_degenerate ? " (degenerate)" : "");
    std::printf("f1         %.6f%s\n", r.f1, r.f1_degenerate ? " (degenerate)" : "");
    std::printf("roc_auc    %.6f\n", r.roc_auc);
    std::printf("pr_auc     %.6f\n", r.pr_auc);
    std::printf("mcc        %.6f\n", r.mcc);
}

std::vector<std::string> split_terms(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_ingest(const GlobalOpts& g, const std::string& data, const std::string& text_col,
               const std::string& label_col, const std::string& id_col,
               const std::string& label2_col) {
    corpus::CsvColumns cols;
    cols.text_column = text_col;
    cols.label_column = label_col;
    if (!id_col.empty()) cols.id_column = id_col;
    if (!label2_col.empty()) cols.label2_column = label2_col;
    corpus::Dataset ds = corpus::load_csv(data, cols);
    double ratio = corpus::balance_ratio(ds);

    json j{{"documents", ds.size()},
           {"positive_count", ds.positive_count},
           {"negative_count", ds.negative_count},
           {"balance_ratio", ratio}};
    if (cols.label2_column) {
        std::vector<int> a, b;
        for (const auto& d : ds.documents) {
            if (!d.label2) continue;
            a.push_back(d.label);
            b.push_back(*d.label2);
        }
        if (!a.empty()) j["cohen_kappa"] = metrics::cohen_kappa(a, b);
    }
    if (g.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("documents      %zu\n", ds.size());
        std::printf("positive       %zu\n", ds.positive_count);
        std::printf("negative       %zu\n", ds.negative_count);
        std::printf("balance ratio  %.4f\n", ratio);
        if (j.contains("cohen_kappa"))
            std::printf("cohen's kappa  %.4f\n", j["cohen_kappa"].get<double>());
    }
    return 0;
}

int cmd_synth(const GlobalOpts& g, std::size_t n, double ratio, const std::string& terms_csv,
              std::size_t noise_vocab, bool positives_only) {
    corpus::SyntheticConfig cfg;
    cfg.n = n;
    cfg.ratio = ratio;
    cfg.seed = g.seed;
    cfg.noise_vocab_size = noise_vocab;
    cfg.topic_terms = split_terms(terms_csv);
    if (cfg.topic_terms.empty())
        for (const auto& t : classic::published_lexicon().key_terms) cfg.topic_terms.push_back(t);
    std::sort(cfg.topic_terms.begin(), cfg.topic_terms.end());

    corpus::Dataset ds =
        positives_only ? corpus::generate_positive_pool(n, cfg) : corpus::generate_synthetic(cfg);
    std::filesystem::create_directories(g.out);
    std::string path = g.out + "/corpus.csv";
    corpus::save_csv(ds, path);
    if (g.format == "json")
        std::cout << json{{"path", path},
                          {"documents", ds.size()},
                          {"positive_count", ds.positive_count},
                          {"negative_count", ds.negative_count}}
                         .dump(2)
                  << "\n";
    else
        std::printf("wrote %s (%zu docs, %zu positive)\n", path.c_str(), ds.size(),
                    ds.positive_count);
    return 0;
}

bench::ExperimentConfig single_method_config(const GlobalOpts& g, const std::string& method,
                                             const std::string& data,
                                             const std::string& config_path) {
    bench::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = bench::load_config(config_path);
    cfg.data_csv = data;
    cfg.synthetic.reset();
    cfg.methods = {method};
    cfg.seed = g.seed;
    if (!cfg.tuning_budget.count(method)) cfg.tuning_budget[method] = 1;
    return cfg;
}

int cmd_train(const GlobalOpts& g, const std::string& method, const std::string& data,
              const std::string& config_path, const std::string& params_path) {
    bench::ExperimentConfig cfg = single_method_config(g, method, data, config_path);
    tune::ParamMap params;
    if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) throw DataError("missing params file: " + params_path);
        json j;
        in >> j;
        params = model_io::param_map_from_json(j);
    }
    corpus::Dataset ds = corpus::load_csv(data, cfg.csv_columns);

    textprep::PrepConfig prep = textprep::PrepConfig::defaults();
    prep.stemming = false;
    std::vector<textprep::TokenList> raw_tokens(ds.size());
    std::vector<int> y(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        raw_tokens[i] = textprep::clean_and_tokenize(ds.documents[i].raw_text, prep);
        y[i] = ds.documents[i].label;
    }
    // Sequence models keep a slice for early stopping; a plain fit otherwise.
    std::vector<textprep::TokenList> train_tokens = raw_tokens, valid_tokens;
    std::vector<int> train_y = y, valid_y;
    if (bench::is_neural_method(method)) {
        // no test cut here, just a stratified validation slice
        corpus::DataSplit split = corpus::stratified_split(ds, 0.0, 0.15, g.seed);
        train_tokens.clear();
        train_y.clear();
        for (std::size_t i : split.train) {
            train_tokens.push_back(raw_tokens[i]);
            train_y.push_back(y[i]);
        }
        for (std::size_t i : split.valid) {
            valid_tokens.push_back(raw_tokens[i]);
            valid_y.push_back(y[i]);
        }
    }

    auto tm = bench::fit_method(method, params, cfg, train_tokens, train_y, valid_tokens,
                                valid_y, ds.fingerprint());
    std::filesystem::create_directories(g.out);
    std::string path = g.out + "/model.json";
    model_io::save_model(tm, path);
    if (g.format == "json")
        std::cout << json{{"path", path}, {"method", method}}.dump(2) << "\n";
    else
        std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& model_path, const std::string& data) {
    auto tm = model_io::load_model(model_path);
    corpus::Dataset ds = corpus::load_csv(data);
    std::vector<std::string> texts;
    std::vector<int> y;
    for (const auto& d : ds.documents) {
        texts.push_back(d.raw_text);
        y.push_back(d.label);
    }
    auto pred = tm.predict_texts(texts);
    auto report = metrics::compute_report(y, pred.labels, pred.scores);
    print_report(report, g.format);
    return 0;
}

int cmd_tune(const GlobalOpts& g, const std::string& method, const std::string& data,
             std::size_t budget, const std::string& config_path) {
    bench::ExperimentConfig cfg = single_method_config(g, method, data, config_path);
    cfg.tuning_budget[method] = budget;
    bench::RunResult result = bench::run_benchmark(cfg);
    const auto& mr = result.methods.front();
    if (mr.failed) throw NumericError("tuning failed: " + mr.error);
    std::filesystem::create_directories(g.out);
    bench::emit_trials(result, g.out);
    json best = model_io::param_map_to_json(mr.best_config);
    if (g.format == "json")
        std::cout << json{{"method", method}, {"best_config", best}, {"test_f1", mr.report.f1}}
                         .dump(2)
                  << "\n";
    else
        std::printf("best config: %s\ntest F1 %.6f\ntrials: %s/trials.jsonl\n",
                    best.dump().c_str(), mr.report.f1, g.out.c_str());
    return 0;
}

bool config_names_output_dir(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) return false;
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        return false;
    }
    return j.contains("output_dir");
}

int cmd_bench(const GlobalOpts& g, const std::string& config_path) {
    bench::ExperimentConfig cfg = bench::load_config(config_path);
    if (!config_names_output_dir(config_path)) cfg.output_dir = g.out;
    bench::RunResult result = bench::run_benchmark(cfg);
    std::string dir = bench::results_dir(cfg);
    bench::emit_report(result, dir, "json");
    bench::emit_report(result, dir, "csv");
    bench::emit_report(result, dir, "md");
    bench::emit_timings(result, dir);
    bench::emit_trials(result, dir);
    std::size_t ok = 0;
    for (const auto& m : result.methods) ok += !m.failed;
    if (ok >= 2) bench::emit_mcnemar(bench::pairwise_mcnemar(result), dir);
    if (g.format == "json")
        std::cout << json{{"results_dir", dir}}.dump(2) << "\n";
    else
        std::printf("results in %s\n", dir.c_str());
    return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& config_path) {
    bench::ExperimentConfig cfg = bench::load_config(config_path);
    if (!config_names_output_dir(config_path)) cfg.output_dir = g.out;
    auto sweep = bench::balance_sweep(cfg);
    std::string dir = bench::results_dir(cfg);
    bench::emit_sweep_csv(sweep, dir);
    if (g.format == "json")
        std::cout << json{{"results_dir", dir}, {"points", sweep.size()}}.dump(2) << "\n";
    else
        std::printf("sweep written to %s/sweep.csv\n", dir.c_str());
    return 0;
}

int cmd_compare(const GlobalOpts& g, const std::string& run_path) {
    std::ifstream in(run_path);
    if (!in) throw DataError("missing run file: " + run_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed run JSON: ") + e.what());
    }
    auto result = bench::run_result_from_json(j);
    auto matrix = bench::pairwise_mcnemar(result);
    std::filesystem::create_directories(g.out);
    bench::emit_mcnemar(matrix, g.out);
    if (g.format == "json") {
        std::cout << json{{"path", g.out + "/mcnemar.json"}}.dump(2) << "\n";
    } else {
        std::printf("pairwise McNemar (mu; * = reject at 0.05):\n%-10s", "");
        for (const auto& m : matrix.methods) std::printf(" %10s", m.c_str());
        std::printf("\n");
        for (std::size_t i = 0; i < matrix.methods.size(); ++i) {
            std::printf("%-10s", matrix.methods[i].c_str());
            for (std::size_t k = 0; k < matrix.methods.size(); ++k) {
                if (!matrix.cells[i][k])
                    std::printf(" %10s", "-");
                else
                    std::printf(" %9.3f%c", matrix.cells[i][k]->statistic,
                                matrix.cells[i][k]->reject_at_0_05 ? '*' : ' ');
            }
            std::printf("\n");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"short-text binary classification benchmark"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "global random seed")->capture_default_str();
    app.add_option("--out", g.out, "output directory")
        ->envname("SHORTCLASS_OUT")
        ->capture_default_str();
    app.add_option("--format", g.format, "output format: table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    app.add_option("--workers", g.workers, "worker cap for parallel kernels")
        ->capture_default_str();

    std::string data, text_col = "text", label_col = "label", id_col, label2_col;
    auto* ingest = app.add_subcommand("ingest", "validate a CSV corpus and print class counts");
    ingest->add_option("--data", data, "input CSV")->required();
    ingest->add_option("--text-col", text_col, "text column name")->capture_default_str();
    ingest->add_option("--label-col", label_col, "label column name")->capture_default_str();
    ingest->add_option("--id-col", id_col, "id column name");
    ingest->add_option("--label2-col", label2_col, "second coder label column");

    std::size_t synth_n = 1000, noise_vocab = 500;
    double synth_ratio = 1.0;
    std::string terms_csv;
    bool positives_only = false;
    auto* synth = app.add_subcommand("synth", "write a synthetic labeled corpus");
    synth->add_option("--n", synth_n, "number of documents")->capture_default_str();
    synth->add_option("--ratio", synth_ratio, "positive/negative ratio in (0,1]")
        ->capture_default_str();
    synth->add_option("--topic-terms", terms_csv, "comma-separated planted topic terms");
    synth->add_option("--noise-vocab", noise_vocab, "noise vocabulary size")
        ->capture_default_str();
    synth->add_flag("--positives-only", positives_only, "emit an augmentation pool");

    std::string method, config_path, params_path, model_path;
    auto* train = app.add_subcommand("train", "fit one model and serialize it");
    train->add_option("--method", method, "method name")->required();
    train->add_option("--data", data, "training CSV")->required();
    train->add_option("--config", config_path, "experiment config JSON");
    train->add_option("--params", params_path, "hyperparameter JSON");

    auto* evaluate = app.add_subcommand("evaluate", "score a saved model on a CSV");
    evaluate->add_option("--model", model_path, "model JSON")->required();
    evaluate->add_option("--data", data, "evaluation CSV")->required();

    std::size_t budget = 20;
    auto* tune_cmd = app.add_subcommand("tune", "hyperparameter search for one method");
    tune_cmd->add_option("--method", method, "method name")->required();
    tune_cmd->add_option("--data", data, "CSV corpus")->required();
    tune_cmd->add_option("--budget", budget, "number of trials")->required();
    tune_cmd->add_option("--config", config_path, "experiment config JSON");

    auto* bench_cmd = app.add_subcommand("bench", "run the full benchmark from a config");
    bench_cmd->add_option("--config", config_path, "experiment config JSON")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "balance-ratio sweep from a config");
    sweep_cmd->add_option("--config", config_path, "experiment config JSON")->required();

    std::string run_path;
    auto* compare = app.add_subcommand("compare", "pairwise McNemar tests on a saved run");
    compare->add_option("--run", run_path, "report.json from a bench run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    set_workers(g.workers);

    try {
        if (*ingest) return cmd_ingest(g, data, text_col, label_col, id_col, label2_col);
        if (*synth) return cmd_synth(g, synth_n, synth_ratio, terms_csv, noise_vocab,
                                     positives_only);
        if (*train) return cmd_train(g, method, data, config_path, params_path);
        if (*evaluate) return cmd_evaluate(g, model_path, data);
        if (*tune_cmd) return cmd_tune(g, method, data, budget, config_path);
        if (*bench_cmd) return cmd_bench(g, config_path);
        if (*sweep_cmd) return cmd_sweep(g, config_path);
        if (*compare) return cmd_compare(g, run_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
