#include "socmap/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "socmap/error.hpp"

namespace socmap {

namespace {

bool is_alnum_ascii(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::vector<std::string> tokenize(const std::string& text, const VectorizerConfig& cfg) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (is_alnum_ascii(c)) {
            if (cfg.lowercase && c >= 'A' && c <= 'Z') c = c - 'A' + 'a';
            cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        uint32_t n_min, uint32_t n_max) {
    if (n_min > n_max)
        throw UsageError("extract_ngrams: n_min exceeds n_max");
    std::vector<std::string> grams;
    size_t len = tokens.size();
    for (uint32_t n = n_min; n <= n_max && n <= len; ++n) {
        for (size_t start = 0; start + n <= len; ++start) {
            std::string g = tokens[start];
            for (size_t j = 1; j < n; ++j) {
                g.push_back(' ');
                g += tokens[start + j];
            }
            grams.push_back(std::move(g));
        }
    }
    return grams;
}

TfidfModel tfidf_fit(const Dataset& corpus, const VectorizerConfig& cfg) {
    if (cfg.n_min == 0 || cfg.n_min > cfg.n_max)
        throw UsageError("tfidf_fit: require 1 <= n_min <= n_max");
    if (cfg.min_df > cfg.max_df || cfg.min_df < 0.0 || cfg.max_df > 1.0)
        throw UsageError("tfidf_fit: require 0 <= min_df <= max_df <= 1");
    if (corpus.empty())
        throw DataError("tfidf_fit: empty corpus");

    std::map<std::string, uint32_t> df;
    for (const auto& r : corpus.records()) {
        auto grams = extract_ngrams(tokenize(r.job_description, cfg), cfg.n_min, cfg.n_max);
        std::set<std::string> distinct(grams.begin(), grams.end());
        for (auto& g : distinct) ++df[g];
    }

    uint32_t n_docs = static_cast<uint32_t>(corpus.size());
    TfidfModel m;
    m.config = cfg;
    m.vocabulary.corpus_size = n_docs;
    // std::map iteration gives the lexicographic index assignment.
    for (const auto& [gram, count] : df) {
        double proportion = static_cast<double>(count) / n_docs;
        if (proportion >= cfg.min_df && proportion <= cfg.max_df) {
            uint32_t idx = static_cast<uint32_t>(m.vocabulary.ngrams.size());
            m.vocabulary.ngram_to_index.emplace(gram, idx);
            m.vocabulary.ngrams.push_back(gram);
            m.vocabulary.df.push_back(count);
        }
    }
    if (m.vocabulary.ngrams.empty())
        throw DataError("tfidf_fit: vocabulary empty after df pruning");

    m.idf.reserve(m.vocabulary.size());
    for (uint32_t t = 0; t < m.vocabulary.size(); ++t) {
        double idf = std::log((1.0 + n_docs) / (1.0 + m.vocabulary.df[t])) + 1.0;
        m.idf.push_back(idf);
    }
    return m;
}

SparseVector tfidf_transform(const TfidfModel& m, const std::string& text) {
    auto grams =
        extract_ngrams(tokenize(text, m.config), m.config.n_min, m.config.n_max);
    std::map<uint32_t, double> counts;
    for (const auto& g : grams) {
        auto it = m.vocabulary.ngram_to_index.find(g);
        if (it != m.vocabulary.ngram_to_index.end()) counts[it->second] += 1.0;
    }

    SparseVector v;
    v.dim = m.dim();
    v.indices.reserve(counts.size());
    v.values.reserve(counts.size());
    double norm_sq = 0.0;
    for (const auto& [idx, count] : counts) {
        double w = count * m.idf[idx];
        v.indices.push_back(idx);
        v.values.push_back(w);
        norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& w : v.values) w *= inv;
    }
    return v;
}

std::string tfidf_to_json(const TfidfModel& m) {
    // Hand-assembled so idf weights are written with exactly %.17g; strings
    // go through nlohmann's escaper.
    std::string out = "{\n  \"format\": \"socmap-tfidf\",\n  \"version\": 1,\n";
    out += "  \"config\": {\"n_min\": " + std::to_string(m.config.n_min);
    out += ", \"n_max\": " + std::to_string(m.config.n_max);
    out += ", \"min_df\": " + format17(m.config.min_df);
    out += ", \"max_df\": " + format17(m.config.max_df);
    out += std::string(", \"lowercase\": ") + (m.config.lowercase ? "true" : "false");
    out += "},\n  \"corpus_size\": " + std::to_string(m.vocabulary.corpus_size);
    out += ",\n  \"ngrams\": [";
    for (uint32_t t = 0; t < m.vocabulary.size(); ++t) {
        if (t) out += ", ";
        out += nlohmann::json(m.vocabulary.ngrams[t]).dump();
    }
    out += "],\n  \"df\": [";
    for (uint32_t t = 0; t < m.vocabulary.size(); ++t) {
        if (t) out += ", ";
        out += std::to_string(m.vocabulary.df[t]);
    }
    out += "],\n  \"idf\": [";
    for (uint32_t t = 0; t < m.idf.size(); ++t) {
        if (t) out += ", ";
        out += format17(m.idf[t]);
    }
    out += "]\n}\n";
    return out;
}

TfidfModel tfidf_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("tfidf model: invalid JSON (") + e.what() + ")");
    }
    if (j.value("format", "") != "socmap-tfidf")
        throw DataError("tfidf model: unrecognized format tag");
    int version = j.value("version", -1);
    if (version != 1)
        throw DataError("tfidf model: unsupported version " + std::to_string(version));

    TfidfModel m;
    const auto& c = j.at("config");
    m.config.n_min = c.at("n_min").get<uint32_t>();
    m.config.n_max = c.at("n_max").get<uint32_t>();
    m.config.min_df = c.at("min_df").get<double>();
    m.config.max_df = c.at("max_df").get<double>();
    m.config.lowercase = c.at("lowercase").get<bool>();
    m.vocabulary.corpus_size = j.at("corpus_size").get<uint32_t>();
    m.vocabulary.ngrams = j.at("ngrams").get<std::vector<std::string>>();
    m.vocabulary.df = j.at("df").get<std::vector<uint32_t>>();
    m.idf = j.at("idf").get<std::vector<double>>();
    if (m.vocabulary.df.size() != m.vocabulary.ngrams.size() ||
        m.idf.size() != m.vocabulary.ngrams.size())
        throw DataError("tfidf model: inconsistent array lengths");
    for (uint32_t t = 0; t < m.vocabulary.ngrams.size(); ++t)
        if (!m.vocabulary.ngram_to_index.emplace(m.vocabulary.ngrams[t], t).second)
            throw DataError("tfidf model: duplicate n-gram in vocabulary");
    return m;
}

} // namespace socmap
