#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// SHORTCLASS_BIN is injected by the build: the path to the CLI executable.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run_cli(const std::string& args) {
    std::string cmd = std::string(SHORTCLASS_BIN) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct CliDir {
    fs::path dir;
    CliDir() : dir("cli_test_out") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~CliDir() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("cli: synth then ingest reports the requested ratio") {
    CliDir tmp;
    REQUIRE(run_cli("--seed 1 --out " + tmp.dir.string() +
                    " synth --n 1000 --ratio 0.09") == 0);
    REQUIRE(fs::exists(tmp.dir / "corpus.csv"));

    REQUIRE(run_cli("--format json ingest --data " + (tmp.dir / "corpus.csv").string()) == 0);
    json j = json::parse(slurp("cli_stdout.txt"));
    double ratio = j.at("balance_ratio").get<double>();
    CHECK(ratio >= 0.07);
    CHECK(ratio <= 0.11);
}

TEST_CASE("cli: lexicon evaluate has recall 1.0 on keyword-positive data") {
    CliDir tmp;
    // every positive text carries "climatechange"
    std::ofstream csv(tmp.dir / "lex.csv");
    csv << "text,label\n";
    for (int i = 0; i < 20; ++i) csv << "climatechange update " << i << ",1\n";
    for (int i = 0; i < 20; ++i) csv << "nothing to see " << i << ",0\n";
    csv.close();

    REQUIRE(run_cli("--out " + tmp.dir.string() + " train --method lexicon --data " +
                    (tmp.dir / "lex.csv").string()) == 0);
    REQUIRE(fs::exists(tmp.dir / "model.json"));
    REQUIRE(run_cli("--format json evaluate --model " + (tmp.dir / "model.json").string() +
                    " --data " + (tmp.dir / "lex.csv").string()) == 0);
    json j = json::parse(slurp("cli_stdout.txt"));
    CHECK(j.at("recall").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cli: train and evaluate a vector-space model end to end") {
    CliDir tmp;
    REQUIRE(run_cli("--seed 5 --out " + tmp.dir.string() +
                    " synth --n 400 --ratio 1.0 --topic-terms climate,globalwarming") == 0);
    std::string data = (tmp.dir / "corpus.csv").string();
    REQUIRE(run_cli("--seed 5 --out " + tmp.dir.string() + " train --method nb --data " +
                    data) == 0);
    REQUIRE(run_cli("--format json evaluate --model " + (tmp.dir / "model.json").string() +
                    " --data " + data) == 0);
    json j = json::parse(slurp("cli_stdout.txt"));
    CHECK(j.at("f1").get<double>() > 0.9);  // in-sample fit on separable data
}

TEST_CASE("cli: bench writes the results bundle and compare reads it back") {
    CliDir tmp;
    json cfg;
    cfg["synthetic"] = {{"n", 300},
                        {"ratio", 0.5},
                        {"topic_terms", json::array({"climate", "globalwarming"})},
                        {"noise_vocab_size", 100},
                        {"seed", 4}};
    cfg["methods"] = json::array({"lexicon", "nb", "logreg"});
    cfg["seed"] = 4;
    cfg["tuning_budget"] = {{"lexicon", 2}, {"nb", 2}, {"logreg", 2}};
    cfg["output_dir"] = (tmp.dir / "results").string();
    cfg["lexicon_terms"] = json::array({"climate", "globalwarming"});
    std::ofstream(tmp.dir / "config.json") << cfg.dump(2);

    REQUIRE(run_cli("--format json bench --config " + (tmp.dir / "config.json").string()) == 0);
    json out = json::parse(slurp("cli_stdout.txt"));
    fs::path results = out.at("results_dir").get<std::string>();
    for (const char* name :
         {"report.json", "report.csv", "report.md", "timings.json", "trials.jsonl",
          "mcnemar.json"})
        CHECK(fs::exists(results / name));

    REQUIRE(run_cli("--out " + tmp.dir.string() + " compare --run " +
                    (results / "report.json").string()) == 0);
    CHECK(fs::exists(tmp.dir / "mcnemar.json"));
}

TEST_CASE("cli exit codes: usage 1, data 2") {
    CHECK(run_cli("--no-such-flag") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("ingest --data missing_file.csv") == 2);

    // usage text lands on stderr
    run_cli("--no-such-flag");
    CHECK(slurp("cli_stderr.txt").find("Usage") != std::string::npos);
}

TEST_CASE("cli: repeated runs with the same seed write identical artifacts") {
    CliDir tmp;
    std::string a = (tmp.dir / "a").string(), b = (tmp.dir / "b").string();
    REQUIRE(run_cli("--seed 9 --out " + a + " synth --n 200 --ratio 0.5") == 0);
    REQUIRE(run_cli("--seed 9 --out " + b + " synth --n 200 --ratio 0.5") == 0);
    CHECK(slurp(a + "/corpus.csv") == slurp(b + "/corpus.csv"));

    fs::remove("cli_stdout.txt");
    fs::remove("cli_stderr.txt");
}
