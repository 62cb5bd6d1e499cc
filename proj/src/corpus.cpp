#include "shortclass/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "shortclass/common.hpp"

namespace shortclass::corpus {

void Dataset::recount() {
    positive_count = 0;
    negative_count = 0;
    for (const auto& d : documents) {
        if (d.label == 1)
            ++positive_count;
        else
            ++negative_count;
    }
}

void Dataset::append(LabeledDocument doc) {
    if (doc.label == 1)
        ++positive_count;
    else
        ++negative_count;
    documents.push_back(std::move(doc));
}

std::uint64_t Dataset::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& d : documents) {
        h = fnv1a64(d.id, h);
        h = fnv1a64(d.raw_text, h);
        unsigned char lab = static_cast<unsigned char>(d.label);
        h = fnv1a64(&lab, 1, h);
    }
    return h;
}

namespace {

std::uint64_t index_fingerprint(const std::vector<std::size_t>& indices) {
    std::vector<std::size_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    return fnv1a64(sorted.data(), sorted.size() * sizeof(std::size_t));
}

}  // namespace

std::uint64_t DataSplit::train_fingerprint() const { return index_fingerprint(train); }
std::uint64_t DataSplit::test_fingerprint() const { return index_fingerprint(test); }

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

// RFC-4180 record reader over the raw file contents.
std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&]() {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    std::size_t i = 0;
    const std::size_t n = content.size();
    while (i < n) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && content[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
        } else if (c == '"' && !field_started && field.empty()) {
            in_quotes = true;
            field_started = true;
            ++i;
        } else if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r') {
            if (i + 1 < n && content[i + 1] == '\n') {
                end_record();
                i += 2;
            } else {
                end_record();
                ++i;
            }
        } else if (c == '\n') {
            end_record();
            ++i;
        } else {
            field += c;
            field_started = true;
            ++i;
        }
    }
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

std::string csv_escape(const std::string& s) {
    bool needs_quote = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

int parse_binary_label(const std::string& raw, std::size_t data_row,
                       const std::string& column) {
    std::string v = raw;
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.pop_back();
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.erase(v.begin());
    if (v == "0") return 0;
    if (v == "1") return 1;
    throw DataError("label outside {0,1} in column '" + column + "' at data row " +
                    std::to_string(data_row) + ": '" + raw + "'");
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvColumns& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto records = parse_csv(buf.str());
    if (records.empty()) throw DataError("empty CSV: " + path);

    const auto& header = records.front();
    auto find_col = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DataError("missing column '" + name + "' in " + path);
        return static_cast<std::size_t>(it - header.begin());
    };

    std::size_t text_idx = find_col(columns.text_column);
    std::size_t label_idx = find_col(columns.label_column);
    std::optional<std::size_t> id_idx;
    if (columns.id_column) id_idx = find_col(*columns.id_column);
    std::optional<std::size_t> label2_idx;
    if (columns.label2_column) label2_idx = find_col(*columns.label2_column);

    Dataset ds;
    std::unordered_set<std::string> seen_ids;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() == 1 && rec[0].empty()) continue;  // trailing blank line
        std::size_t needed = std::max({text_idx, label_idx,
                                       id_idx.value_or(0), label2_idx.value_or(0)});
        if (rec.size() <= needed)
            throw DataError("short record at data row " + std::to_string(r));

        LabeledDocument doc;
        doc.raw_text = rec[text_idx];
        doc.label = parse_binary_label(rec[label_idx], r, columns.label_column);
        if (label2_idx)
            doc.label2 = parse_binary_label(rec[*label2_idx], r, *columns.label2_column);
        doc.id = id_idx ? rec[*id_idx] : "row-" + std::to_string(r);
        if (!seen_ids.insert(doc.id).second)
            throw DataError("duplicate id '" + doc.id + "' at data row " + std::to_string(r));
        ds.append(std::move(doc));
    }
    return ds;
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write: " + path);
    bool has_label2 = std::any_of(dataset.documents.begin(), dataset.documents.end(),
                                  [](const LabeledDocument& d) { return d.label2.has_value(); });
    out << "id,text,label";
    if (has_label2) out << ",label2";
    out << "\n";
    for (const auto& d : dataset.documents) {
        out << csv_escape(d.id) << ',' << csv_escape(d.raw_text) << ',' << d.label;
        if (has_label2) out << ',' << (d.label2 ? std::to_string(*d.label2) : std::string());
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

namespace {

// Largest-remainder allocation of frac*count_c per class; guarantees the
// per-class take deviates from the exact quota by less than one document.
std::vector<std::size_t> largest_remainder(const std::vector<std::size_t>& class_counts,
                                           double frac) {
    std::vector<std::size_t> base(class_counts.size());
    std::vector<double> rem(class_counts.size());
    double total_quota = 0.0;
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
        double quota = frac * static_cast<double>(class_counts[c]);
        base[c] = static_cast<std::size_t>(quota);
        rem[c] = quota - static_cast<double>(base[c]);
        total_quota += quota;
    }
    auto want = static_cast<std::size_t>(std::llround(total_quota));
    std::size_t have = std::accumulate(base.begin(), base.end(), std::size_t{0});
    std::vector<std::size_t> order(class_counts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t idx = 0; have < want && idx < order.size(); ++idx, ++have)
        ++base[order[idx]];
    return base;
}

}  // namespace

DataSplit stratified_split(const Dataset& dataset, double test_frac,
                           double valid_frac_of_train, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < dataset.documents.size(); ++i)
        by_class[dataset.documents[i].label == 1 ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < 3)
            throw DataError("class " + std::to_string(c) +
                            " too small to stratify (has " +
                            std::to_string(by_class[c].size()) + ", needs 3)");

    Rng rng(derive_seed(seed, 0x5f17));
    for (auto& cls : by_class) std::shuffle(cls.begin(), cls.end(), rng);

    std::vector<std::size_t> counts = {by_class[0].size(), by_class[1].size()};
    auto test_take = largest_remainder(counts, test_frac);

    DataSplit split;
    split.seed = seed;
    std::vector<std::vector<std::size_t>> rest(2);
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < by_class[c].size(); ++i) {
            if (i < test_take[c])
                split.test.push_back(by_class[c][i]);
            else
                rest[c].push_back(by_class[c][i]);
        }
    }

    std::vector<std::size_t> rest_counts = {rest[0].size(), rest[1].size()};
    auto valid_take = largest_remainder(rest_counts, valid_frac_of_train);
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < rest[c].size(); ++i) {
            if (i < valid_take[c])
                split.valid.push_back(rest[c][i]);
            else
                split.train.push_back(rest[c][i]);
        }
    }

    std::sort(split.train.begin(), split.train.end());
    std::sort(split.valid.begin(), split.valid.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

double balance_ratio(const Dataset& dataset) {
    if (dataset.negative_count == 0)
        throw DataError("balance ratio undefined: no negative documents");
    return static_cast<double>(dataset.positive_count) /
           static_cast<double>(dataset.negative_count);
}

double balance_ratio(const Dataset& dataset, const std::vector<std::size_t>& indices) {
    std::size_t pos = 0, neg = 0;
    for (std::size_t i : indices) {
        if (dataset.documents[i].label == 1)
            ++pos;
        else
            ++neg;
    }
    if (neg == 0) throw DataError("balance ratio undefined: no negative documents");
    return static_cast<double>(pos) / static_cast<double>(neg);
}

RebalanceResult rebalance(const Dataset& dataset, const DataSplit& split,
                          const Dataset& pool, double target_ratio,
                          std::uint64_t seed) {
    for (const auto& d : pool.documents)
        if (d.label != 1)
            throw DataError("rebalance pool contains a negative label (id '" + d.id + "')");

    const std::vector<std::size_t>* parts[3] = {&split.train, &split.valid, &split.test};
    std::size_t need[3] = {0, 0, 0};
    std::size_t total_needed = 0;
    for (int s = 0; s < 3; ++s) {
        std::size_t pos = 0, neg = 0;
        for (std::size_t i : *parts[s]) {
            if (dataset.documents[i].label == 1)
                ++pos;
            else
                ++neg;
        }
        if (neg == 0) throw DataError("rebalance: split has no negative documents");
        auto wanted = std::llround(target_ratio * static_cast<double>(neg));
        long long k = wanted - static_cast<long long>(pos);
        if (k < 0)
            throw DataError("rebalance: split ratio already above target (cannot remove documents)");
        need[s] = static_cast<std::size_t>(k);
        total_needed += need[s];
    }
    if (total_needed > pool.size())
        throw DataError("rebalance: pool exhausted before target reached (need " +
                        std::to_string(total_needed) + ", have " +
                        std::to_string(pool.size()) + ")");

    std::vector<std::size_t> pool_order(pool.size());
    std::iota(pool_order.begin(), pool_order.end(), 0);
    Rng rng(derive_seed(seed, 0xba1a));
    std::shuffle(pool_order.begin(), pool_order.end(), rng);

    RebalanceResult result;
    result.dataset = dataset;
    result.split = split;
    std::vector<std::size_t>* out_parts[3] = {&result.split.train, &result.split.valid,
                                              &result.split.test};
    std::size_t cursor = 0;
    for (int s = 0; s < 3; ++s) {
        for (std::size_t t = 0; t < need[s]; ++t) {
            const auto& doc = pool.documents[pool_order[cursor++]];
            out_parts[s]->push_back(result.dataset.size());
            result.dataset.append(doc);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

std::string noise_word(std::size_t index) {
    std::string w = "qaaaa";
    for (int pos = 4; pos >= 1; --pos) {
        w[static_cast<std::size_t>(pos)] = static_cast<char>('a' + index % 26);
        index /= 26;
    }
    return w;
}

namespace {

std::string make_text(Rng& rng, const SyntheticConfig& config, bool with_topic_term,
                      std::size_t n_topic_terms) {
    std::uniform_int_distribution<std::size_t> noise_pick(0, config.noise_vocab_size - 1);
    std::uniform_int_distribution<std::size_t> noise_len(4, 12);
    std::uniform_int_distribution<std::size_t> term_pick(0, config.topic_terms.size() - 1);

    std::vector<std::string> tokens;
    std::size_t m = noise_len(rng);
    for (std::size_t i = 0; i < m; ++i) tokens.push_back(noise_word(noise_pick(rng)));
    if (with_topic_term)
        for (std::size_t i = 0; i < n_topic_terms; ++i)
            tokens.push_back(config.topic_terms[term_pick(rng)]);
    std::shuffle(tokens.begin(), tokens.end(), rng);

    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) text += ' ';
        text += tokens[i];
    }
    return text;
}

std::size_t positives_for(std::size_t n, double ratio) {
    double ideal = ratio * static_cast<double>(n) / (1.0 + ratio);
    auto p = static_cast<long long>(std::llround(ideal));
    p = std::max<long long>(1, std::min<long long>(p, static_cast<long long>(n) - 1));
    // local adjustment: pick the neighbour that lands closest to the ratio
    auto err = [&](long long q) {
        return std::abs(static_cast<double>(q) / static_cast<double>(static_cast<long long>(n) - q) - ratio);
    };
    for (long long cand : {p - 1, p + 1})
        if (cand >= 1 && cand < static_cast<long long>(n) && err(cand) < err(p)) p = cand;
    return static_cast<std::size_t>(p);
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& config) {
    if (config.n < 10) throw DataError("synthetic corpus needs n >= 10");
    if (config.ratio <= 0.0 || config.ratio > 1.0)
        throw DataError("synthetic ratio must lie in (0, 1]");
    if (config.topic_terms.empty()) throw DataError("synthetic corpus needs topic terms");
    if (config.noise_vocab_size == 0) throw DataError("synthetic corpus needs a noise vocabulary");

    std::size_t n_pos = positives_for(config.n, config.ratio);
    std::size_t n_neg = config.n - n_pos;

    Rng rng(derive_seed(config.seed, 0x5e3d));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> n_terms(1, 3);

    Dataset ds;
    for (std::size_t i = 0; i < n_pos; ++i) {
        LabeledDocument d;
        d.label = 1;
        d.source = DocSource::synthetic;
        bool signal = unit(rng) < 0.95;
        d.raw_text = make_text(rng, config, signal, signal ? n_terms(rng) : 0);
        ds.append(std::move(d));
    }
    for (std::size_t i = 0; i < n_neg; ++i) {
        LabeledDocument d;
        d.label = 0;
        d.source = DocSource::synthetic;
        bool contaminated = unit(rng) < 0.02;
        d.raw_text = make_text(rng, config, contaminated, contaminated ? 1 : 0);
        ds.append(std::move(d));
    }
    std::shuffle(ds.documents.begin(), ds.documents.end(), rng);
    for (std::size_t i = 0; i < ds.documents.size(); ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "synth-%06zu", i + 1);
        ds.documents[i].id = buf;
    }
    return ds;
}

Dataset generate_positive_pool(std::size_t n, const SyntheticConfig& config) {
    SyntheticConfig c = config;
    c.n = 2 * n;
    c.ratio = 1.0;
    c.seed = derive_seed(config.seed, 0x9001);
    Dataset all = generate_synthetic(c);
    Dataset pool;
    for (auto& d : all.documents) {
        if (d.label != 1) continue;
        d.source = DocSource::augmentation_pool;
        d.id = "pool-" + d.id;
        pool.append(std::move(d));
        if (pool.size() == n) break;
    }
    return pool;
}

}  // namespace shortclass::corpus
