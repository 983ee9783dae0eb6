#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "socmap/doc2vec.hpp"
#include "socmap/error.hpp"
#include "socmap/rng.hpp"
#include "socmap/tfidf.hpp"

namespace socmap {

namespace {

constexpr char kMagic[8] = {'S', 'O', 'C', 'E', 'M', 'B', '0', '1'};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// -ln sigmoid(z), computed on the log scale so saturated probes stay finite.
double softplus_neg(double z) {
    if (-z > 700.0) return -z;
    return std::log1p(std::exp(-z));
}

struct ProbeEntry {
    uint32_t doc = 0;
    uint32_t target = 0;
    std::vector<uint32_t> negatives;
};

} // namespace

DenseVector dense_from_f32(std::span<const float> v) {
    DenseVector d;
    d.values.assign(v.begin(), v.end());
    return d;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * b[i];
        na += double(a[i]) * a[i];
        nb += double(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<uint32_t> DocEmbedder::doc_token_ids(const std::string& text) const {
    std::vector<uint32_t> ids;
    for (const std::string& tok : tokenize(text, VectorizerConfig{})) {
        auto it = token_index_.find(tok);
        if (it != token_index_.end()) ids.push_back(it->second);
    }
    return ids;
}

uint32_t DocEmbedder::draw_negative(std::mt19937_64& rng) const {
    double u = uniform01(rng) * neg_cdf_.back();
    auto it = std::upper_bound(neg_cdf_.begin(), neg_cdf_.end(), u);
    if (it == neg_cdf_.end()) --it;
    return uint32_t(it - neg_cdf_.begin());
}

void DocEmbedder::rebuild_tables() {
    token_index_.clear();
    for (uint32_t i = 0; i < vocab_.size(); ++i) token_index_[vocab_[i]] = i;
    neg_cdf_.resize(counts_.size());
    double acc = 0.0;
    for (size_t i = 0; i < counts_.size(); ++i) {
        acc += std::pow(double(counts_[i]), 0.75);
        neg_cdf_[i] = acc;
    }
}

DocEmbedder DocEmbedder::fit(std::span<const std::string> texts, const EmbedConfig& cfg) {
    if (texts.empty()) throw DataError("embedding corpus is empty");
    if (cfg.dim == 0) throw DataError("embedding dimension must be positive");

    DocEmbedder e;
    e.cfg_ = cfg;
    e.doc_count_ = texts.size();

    // Lexicographic vocabulary over tokens meeting the count threshold.
    std::map<std::string, uint64_t> freq;
    std::vector<std::vector<std::string>> raw_tokens(texts.size());
    for (size_t d = 0; d < texts.size(); ++d) {
        raw_tokens[d] = tokenize(texts[d], VectorizerConfig{});
        for (const std::string& tok : raw_tokens[d]) ++freq[tok];
    }
    for (const auto& [tok, count] : freq) {
        if (count >= cfg.min_token_count) {
            e.vocab_.push_back(tok);
            e.counts_.push_back(count);
        }
    }
    if (e.vocab_.empty())
        throw DataError("embedding vocabulary is empty after the count threshold");
    e.rebuild_tables();

    std::vector<std::vector<uint32_t>> doc_ids(texts.size());
    uint64_t total_positions = 0;
    for (size_t d = 0; d < texts.size(); ++d) {
        doc_ids[d].reserve(raw_tokens[d].size());
        for (const std::string& tok : raw_tokens[d]) {
            auto it = e.token_index_.find(tok);
            if (it != e.token_index_.end()) doc_ids[d].push_back(it->second);
        }
        total_positions += doc_ids[d].size();
    }
    raw_tokens.clear();
    raw_tokens.shrink_to_fit();
    if (total_positions == 0)
        throw DataError("embedding corpus has no in-vocabulary tokens");

    const uint32_t dim = cfg.dim;
    std::mt19937_64 rng(cfg.seed);
    e.docs_.resize(texts.size() * size_t(dim));
    for (float& v : e.docs_) v = float((uniform01(rng) - 0.5) / double(dim));
    e.words_.assign(e.vocab_.size() * size_t(dim), 0.0f);

    // Fixed probe subset for the per-epoch loss curve; its negatives come
    // from a separate stream so they do not perturb training draws.
    std::vector<ProbeEntry> probes;
    {
        std::mt19937_64 probe_rng(derive_seed(cfg.seed, 1));
        const uint64_t budget = 2000;
        uint64_t stride = std::max<uint64_t>(1, total_positions / budget);
        uint64_t pos = 0;
        for (size_t d = 0; d < doc_ids.size(); ++d) {
            for (uint32_t t : doc_ids[d]) {
                if (pos % stride == 0) {
                    ProbeEntry p;
                    p.doc = uint32_t(d);
                    p.target = t;
                    for (uint32_t k = 0; k < cfg.negative_samples; ++k) {
                        uint32_t neg = e.draw_negative(probe_rng);
                        if (neg != t) p.negatives.push_back(neg);
                    }
                    probes.push_back(std::move(p));
                }
                ++pos;
            }
        }
    }

    const uint64_t total_updates = uint64_t(cfg.epochs) * total_positions;
    const double lr0 = cfg.initial_learning_rate;
    const double lr1 = cfg.final_learning_rate;
    uint64_t update = 0;
    std::vector<double> err(dim);

    for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (size_t d = 0; d < doc_ids.size(); ++d) {
            float* dv = e.docs_.data() + d * size_t(dim);
            for (uint32_t target : doc_ids[d]) {
                double lr = lr0 - (lr0 - lr1) * (double(update) / double(total_updates));
                if (lr < lr1) lr = lr1;
                ++update;

                std::fill(err.begin(), err.end(), 0.0);
                for (uint32_t k = 0; k <= cfg.negative_samples; ++k) {
                    uint32_t word;
                    double label;
                    if (k == 0) {
                        word = target;
                        label = 1.0;
                    } else {
                        word = e.draw_negative(rng);
                        if (word == target) continue;
                        label = 0.0;
                    }
                    float* wv = e.words_.data() + word * size_t(dim);
                    double z = 0.0;
                    for (uint32_t j = 0; j < dim; ++j) z += double(dv[j]) * wv[j];
                    double g = (label - sigmoid(z)) * lr;
                    for (uint32_t j = 0; j < dim; ++j) {
                        err[j] += g * wv[j];
                        wv[j] += float(g * dv[j]);
                    }
                }
                for (uint32_t j = 0; j < dim; ++j) dv[j] += float(err[j]);
            }
        }

        double loss = 0.0;
        for (const ProbeEntry& p : probes) {
            const float* dv = e.docs_.data() + p.doc * size_t(dim);
            const float* tv = e.words_.data() + p.target * size_t(dim);
            double z = 0.0;
            for (uint32_t j = 0; j < dim; ++j) z += double(dv[j]) * tv[j];
            loss += softplus_neg(z);
            for (uint32_t neg : p.negatives) {
                const float* nv = e.words_.data() + neg * size_t(dim);
                double zn = 0.0;
                for (uint32_t j = 0; j < dim; ++j) zn += double(dv[j]) * nv[j];
                loss += softplus_neg(-zn);
            }
        }
        e.probe_loss_.push_back(loss / double(probes.size()));
    }
    return e;
}

std::vector<float> DocEmbedder::infer(const std::string& text) const {
    const uint32_t dim = cfg_.dim;
    std::vector<float> v(dim, 0.0f);
    std::vector<uint32_t> ids = doc_token_ids(text);

    std::mt19937_64 rng(cfg_.seed);
    for (uint32_t j = 0; j < dim; ++j)
        v[j] = float((uniform01(rng) - 0.5) / double(dim));
    if (ids.empty()) return v;

    const uint64_t total_updates = uint64_t(cfg_.epochs) * ids.size();
    const double lr0 = cfg_.initial_learning_rate;
    const double lr1 = cfg_.final_learning_rate;
    uint64_t update = 0;
    std::vector<double> err(dim);

    for (uint32_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
        for (uint32_t target : ids) {
            double lr = lr0 - (lr0 - lr1) * (double(update) / double(total_updates));
            if (lr < lr1) lr = lr1;
            ++update;

            std::fill(err.begin(), err.end(), 0.0);
            for (uint32_t k = 0; k <= cfg_.negative_samples; ++k) {
                uint32_t word;
                double label;
                if (k == 0) {
                    word = target;
                    label = 1.0;
                } else {
                    word = draw_negative(rng);
                    if (word == target) continue;
                    label = 0.0;
                }
                const float* wv = words_.data() + word * size_t(dim);
                double z = 0.0;
                for (uint32_t j = 0; j < dim; ++j) z += double(v[j]) * wv[j];
                double g = (label - sigmoid(z)) * lr;
                for (uint32_t j = 0; j < dim; ++j) err[j] += g * wv[j];
            }
            for (uint32_t j = 0; j < dim; ++j) v[j] += float(err[j]);
        }
    }
    return v;
}

void DocEmbedder::save(BinaryWriter& w) const {
    w.u32(cfg_.dim);
    w.u32(cfg_.window);
    w.u32(cfg_.epochs);
    w.u32(cfg_.negative_samples);
    w.f64(cfg_.initial_learning_rate);
    w.f64(cfg_.final_learning_rate);
    w.u32(cfg_.min_token_count);
    w.u64(cfg_.seed);

    w.u64(vocab_.size());
    for (const std::string& tok : vocab_) w.str(tok);
    for (uint64_t c : counts_) w.u64(c);
    w.f32_array(words_);
    w.u64(doc_count_);
    w.f32_array(docs_);
    w.f64_array(probe_loss_);
}

DocEmbedder DocEmbedder::load(BinaryReader& r) {
    DocEmbedder e;
    e.cfg_.dim = r.u32();
    e.cfg_.window = r.u32();
    e.cfg_.epochs = r.u32();
    e.cfg_.negative_samples = r.u32();
    e.cfg_.initial_learning_rate = r.f64();
    e.cfg_.final_learning_rate = r.f64();
    e.cfg_.min_token_count = r.u32();
    e.cfg_.seed = r.u64();

    uint64_t vocab = r.u64();
    e.vocab_.reserve(vocab);
    for (uint64_t i = 0; i < vocab; ++i) e.vocab_.push_back(r.str());
    e.counts_.resize(vocab);
    for (uint64_t i = 0; i < vocab; ++i) e.counts_[i] = r.u64();
    e.words_ = r.f32_array();
    e.doc_count_ = r.u64();
    e.docs_ = r.f32_array();
    e.probe_loss_ = r.f64_array();

    if (e.words_.size() != vocab * e.cfg_.dim)
        throw IoError("embedding payload: word table size mismatch");
    if (e.docs_.size() != e.doc_count_ * e.cfg_.dim)
        throw IoError("embedding payload: document table size mismatch");
    e.rebuild_tables();
    return e;
}

void DocEmbedder::save_file(const std::string& path) const {
    BinaryWriter w;
    w.raw(kMagic, sizeof(kMagic));
    save(w);
    write_file_bytes(path, w.bytes());
}

DocEmbedder DocEmbedder::load_file(const std::string& path) {
    std::vector<uint8_t> bytes = read_file_bytes(path);
    if (bytes.size() < sizeof(kMagic) ||
        std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw IoError(path + ": not a document-embedding file");
    BinaryReader r(bytes.data() + sizeof(kMagic), bytes.size() - sizeof(kMagic));
    return DocEmbedder::load(r);
}

} // namespace socmap
