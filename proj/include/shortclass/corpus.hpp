#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shortclass::corpus {

enum class DocSource { primary_corpus, augmentation_pool, synthetic };

struct LabeledDocument {
    std::string id;
    std::string raw_text;
    int label = 0;  // 1 = topic-positive
    DocSource source = DocSource::primary_corpus;
    std::optional<int> label2;  // second coder, only consumed by cohen_kappa
};

struct Dataset {
    std::vector<LabeledDocument> documents;
    std::size_t positive_count = 0;
    std::size_t negative_count = 0;

    std::size_t size() const { return documents.size(); }
    void recount();
    void append(LabeledDocument doc);
    // Content hash over (id, text, label) in document order; ties RunResults
    // to the data they saw.
    std::uint64_t fingerprint() const;
};

struct DataSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> valid;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;

    std::uint64_t train_fingerprint() const;
    std::uint64_t test_fingerprint() const;
};

struct CsvColumns {
    std::string text_column = "text";
    std::string label_column = "label";
    std::optional<std::string> id_column;      // absent: ids generated per row
    std::optional<std::string> label2_column;  // e.g. "label2" when present
};

// RFC-4180 reader: quoted fields may contain commas, quotes ("") and newlines.
Dataset load_csv(const std::string& path, const CsvColumns& columns = {});

void save_csv(const Dataset& dataset, const std::string& path);

DataSplit stratified_split(const Dataset& dataset, double test_frac,
                           double valid_frac_of_train, std::uint64_t seed);

inline DataSplit stratified_split(const Dataset& dataset, std::uint64_t seed) {
    return stratified_split(dataset, 0.15, 0.15, seed);
}

double balance_ratio(const Dataset& dataset);
double balance_ratio(const Dataset& dataset, const std::vector<std::size_t>& indices);

struct RebalanceResult {
    Dataset dataset;  // original documents plus the consumed pool documents
    DataSplit split;  // original memberships preserved, new indices appended
};

// Tops up each split with positive documents from the pool until the
// positive/negative ratio of every split is within +/-0.01 of target_ratio.
// Original documents never move between splits; every pool document lands in
// exactly one split.
RebalanceResult rebalance(const Dataset& dataset, const DataSplit& split,
                          const Dataset& pool, double target_ratio,
                          std::uint64_t seed);

struct SyntheticConfig {
    std::size_t n = 1000;
    double ratio = 1.0;  // positives / negatives, in (0, 1]
    std::vector<std::string> topic_terms;
    std::size_t noise_vocab_size = 500;
    std::uint64_t seed = 0;
};

// Desk-scale corpus with a planted topic signal: positives carry >=1 topic
// term with probability 0.95; 2% of negatives carry one too (label noise).
Dataset generate_synthetic(const SyntheticConfig& config);

// Positive-only documents for rebalance pools, drawn from the same generator.
Dataset generate_positive_pool(std::size_t n, const SyntheticConfig& config);

std::string noise_word(std::size_t index);

}  // namespace shortclass::corpus
