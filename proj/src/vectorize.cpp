#include "shortclass/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "shortclass/common.hpp"

namespace shortclass::vectorize {

Vocabulary build_vocab(const std::vector<TokenList>& train_docs,
                       std::size_t max_features, std::uint64_t fit_fingerprint) {
    std::unordered_map<std::string, std::size_t> corpus_freq;
    std::unordered_map<std::string, std::size_t> doc_freq;
    bool any_token = false;
    for (const auto& doc : train_docs) {
        if (!doc.empty()) any_token = true;
        for (const auto& tok : doc) ++corpus_freq[tok];
        std::unordered_map<std::string, bool> seen;
        for (const auto& tok : doc) {
            if (!seen.emplace(tok, true).second) continue;
            ++doc_freq[tok];
        }
    }
    if (!any_token) throw DataError("cannot build vocabulary: all documents empty");

    std::vector<const std::string*> ranked;
    ranked.reserve(corpus_freq.size());
    for (const auto& [tok, _] : corpus_freq) ranked.push_back(&tok);
    std::sort(ranked.begin(), ranked.end(), [&](const std::string* a, const std::string* b) {
        std::size_t fa = corpus_freq.at(*a), fb = corpus_freq.at(*b);
        if (fa != fb) return fa > fb;
        return *a < *b;
    });
    if (max_features > 0 && ranked.size() > max_features) ranked.resize(max_features);

    Vocabulary vocab;
    vocab.max_features = max_features;
    vocab.n_docs_fitted = train_docs.size();
    vocab.fit_fingerprint = fit_fingerprint;
    vocab.index_to_token.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        vocab.token_to_index.emplace(*ranked[i], static_cast<std::uint32_t>(i));
        vocab.index_to_token.push_back(*ranked[i]);
        vocab.doc_frequency.push_back(doc_freq[*ranked[i]]);
        vocab.corpus_frequency.push_back(corpus_freq[*ranked[i]]);
    }
    return vocab;
}

kernels::SparseRow count_vectorize(const TokenList& tokens, const Vocabulary& vocab) {
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& tok : tokens) {
        auto it = vocab.token_to_index.find(tok);
        if (it == vocab.token_to_index.end()) continue;  // OOV dropped
        acc[it->second] += 1.0;
    }
    kernels::SparseRow row(acc.begin(), acc.end());
    std::sort(row.begin(), row.end());
    return row;
}

FeatureMatrix count_matrix(const std::vector<TokenList>& docs, const Vocabulary& vocab) {
    FeatureMatrix m;
    m.n_cols = vocab.size();
    m.rep = Representation::counts;
    m.rows.resize(docs.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(docs.size()); ++i)
        m.rows[static_cast<std::size_t>(i)] =
            count_vectorize(docs[static_cast<std::size_t>(i)], vocab);
    return m;
}

FeatureMatrix tfidf_transform(const FeatureMatrix& counts, const Vocabulary& vocab) {
    if (counts.rep != Representation::counts)
        throw DataError("tfidf_transform expects a counts matrix");
    const double n = static_cast<double>(vocab.n_docs_fitted);
    std::vector<double> idf(vocab.size());
    for (std::size_t j = 0; j < vocab.size(); ++j)
        idf[j] = std::log((1.0 + n) / (1.0 + static_cast<double>(vocab.doc_frequency[j]))) + 1.0;

    FeatureMatrix out;
    out.n_cols = counts.n_cols;
    out.rep = Representation::tfidf;
    out.rows.resize(counts.n_rows());
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(counts.n_rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        kernels::SparseRow row = counts.rows[i];
        double sq = 0.0;
        for (auto& [j, v] : row) {
            v *= idf[j];
            sq += v * v;
        }
        if (sq > 0.0) {
            double inv = 1.0 / std::sqrt(sq);
            for (auto& [j, v] : row) v *= inv;
        }
        out.rows[i] = std::move(row);
    }
    return out;
}

std::vector<std::int32_t> encode_sequence(const TokenList& tokens,
                                          const Vocabulary& vocab, std::size_t max_len) {
    std::vector<std::int32_t> seq;
    seq.reserve(max_len);
    for (const auto& tok : tokens) {
        if (seq.size() == max_len) break;  // truncate from the tail
        auto it = vocab.token_to_index.find(tok);
        if (it == vocab.token_to_index.end()) continue;
        seq.push_back(static_cast<std::int32_t>(it->second) + 1);
    }
    seq.resize(max_len, 0);  // post-pad
    return seq;
}

SequenceBatch sequence_batch(const std::vector<TokenList>& docs,
                             const Vocabulary& vocab, std::size_t max_len) {
    SequenceBatch batch;
    batch.max_len = max_len;
    batch.vocab_size = vocab.size();
    batch.rows.resize(docs.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(docs.size()); ++i)
        batch.rows[static_cast<std::size_t>(i)] =
            encode_sequence(docs[static_cast<std::size_t>(i)], vocab, max_len);
    return batch;
}

void save_vocab_tsv(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);
    for (const auto& [tok, idx] : vocab.token_to_index)
        out << tok << '\t' << idx << '\t' << vocab.doc_frequency[idx] << "\n";
}

}  // namespace shortclass::vectorize
