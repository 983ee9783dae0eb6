#ifndef SOCMAP_TFIDF_HPP
#define SOCMAP_TFIDF_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "socmap/corpus.hpp"
#include "socmap/vectors.hpp"

namespace socmap {

struct VectorizerConfig {
    uint32_t n_min = 1;
    uint32_t n_max = 10;
    double min_df = 0.10; // document-frequency proportion, inclusive bounds
    double max_df = 0.90;
    bool lowercase = true;
};

// Lowercased (if configured) maximal runs of ASCII alphanumerics; every
// other character is a separator.
std::vector<std::string> tokenize(const std::string& text, const VectorizerConfig& cfg);

// All contiguous token subsequences of length n, n_min <= n <= n_max,
// rendered space-joined, in increasing-n then left-to-right order.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        uint32_t n_min, uint32_t n_max);

struct Vocabulary {
    // n-gram -> column index; indices follow the lexicographic order of
    // the retained n-grams.
    std::unordered_map<std::string, uint32_t> ngram_to_index;
    std::vector<std::string> ngrams;  // index -> n-gram
    std::vector<uint32_t> df;         // index -> document frequency at fit time
    uint32_t corpus_size = 0;

    uint32_t size() const { return static_cast<uint32_t>(ngrams.size()); }
};

struct TfidfModel {
    Vocabulary vocabulary;
    std::vector<double> idf; // idf[t] = ln((1+N)/(1+df_t)) + 1
    VectorizerConfig config;

    uint32_t dim() const { return vocabulary.size(); }
};

// Builds the df-pruned vocabulary over the corpus descriptions and the
// smoothed idf weights. Throws DataError for an empty corpus and when
// pruning leaves the vocabulary empty (distinct message).
TfidfModel tfidf_fit(const Dataset& corpus, const VectorizerConfig& cfg);

// Raw in-vocabulary n-gram counts, weighted by idf, L2-normalized.
// Out-of-vocabulary n-grams are ignored; an all-OOV text maps to the zero
// vector.
SparseVector tfidf_transform(const TfidfModel& m, const std::string& text);

// Versioned JSON document; idf weights written with 17 significant digits.
std::string tfidf_to_json(const TfidfModel& m);
TfidfModel tfidf_from_json(const std::string& json_text);

} // namespace socmap

#endif
