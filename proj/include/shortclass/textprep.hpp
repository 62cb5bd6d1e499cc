#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace shortclass::textprep {

using TokenList = std::vector<std::string>;

struct PrepConfig {
    bool lowercase = true;
    bool strip_urls = true;
    bool strip_mentions = true;
    bool keep_hashtag_word = true;
    std::size_t min_token_len = 3;
    std::unordered_set<std::string> stopwords;  // empty = use bundled default
    bool stemming = false;

    static PrepConfig defaults();
};

// The bundled default stopword list: 127 lowercase words (classic English
// function words plus a few high-frequency social-media fillers).
const std::vector<std::string>& default_stopwords();

std::unordered_set<std::string> load_stopwords_file(const std::string& path);

// Cleaning order is fixed: lowercase, URL strip, mention strip, hashtag
// symbol strip, non-alphabet strip, whitespace collapse, length filter,
// stopword filter, optional stem.
TokenList clean_and_tokenize(const std::string& raw_text, const PrepConfig& config);

// Porter (1980) stem of a single lowercase alphabetic word.
std::string porter_stem(const std::string& word);

TokenList stem_tokens(const TokenList& tokens);

}  // namespace shortclass::textprep
