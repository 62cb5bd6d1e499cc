#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shortclass/kernels.hpp"
#include "shortclass/textprep.hpp"

namespace shortclass::vectorize {

using textprep::TokenList;

struct Vocabulary {
    std::map<std::string, std::uint32_t> token_to_index;  // dense 0..V-1
    std::vector<std::string> index_to_token;
    std::vector<std::size_t> doc_frequency;
    std::vector<std::size_t> corpus_frequency;
    std::size_t max_features = 0;
    std::size_t n_docs_fitted = 0;
    std::uint64_t fit_fingerprint = 0;  // split fingerprint of the fitting docs

    std::size_t size() const { return index_to_token.size(); }
};

enum class Representation { counts, tfidf };

struct FeatureMatrix {
    std::size_t n_cols = 0;
    Representation rep = Representation::counts;
    std::vector<kernels::SparseRow> rows;  // each row sorted by column index

    std::size_t n_rows() const { return rows.size(); }
};

struct SequenceBatch {
    std::vector<std::vector<std::int32_t>> rows;  // every row exactly max_len long
    std::size_t max_len = 0;
    std::size_t vocab_size = 0;  // ids lie in [1, vocab_size]; 0 is the pad id
};

// Tokens ranked by corpus frequency (descending), ties broken
// lexicographically; the top max_features survive.
Vocabulary build_vocab(const std::vector<TokenList>& train_docs,
                       std::size_t max_features, std::uint64_t fit_fingerprint = 0);

kernels::SparseRow count_vectorize(const TokenList& tokens, const Vocabulary& vocab);

FeatureMatrix count_matrix(const std::vector<TokenList>& docs, const Vocabulary& vocab);

// value(i,j) = count(i,j) * (ln((1+N)/(1+df_j)) + 1), rows L2-normalized.
FeatureMatrix tfidf_transform(const FeatureMatrix& counts, const Vocabulary& vocab);

std::vector<std::int32_t> encode_sequence(const TokenList& tokens,
                                          const Vocabulary& vocab, std::size_t max_len);

SequenceBatch sequence_batch(const std::vector<TokenList>& docs,
                             const Vocabulary& vocab, std::size_t max_len);

// Audit dump, one "token<TAB>index<TAB>df" line per token, sorted by token.
void save_vocab_tsv(const Vocabulary& vocab, const std::string& path);

}  // namespace shortclass::vectorize
