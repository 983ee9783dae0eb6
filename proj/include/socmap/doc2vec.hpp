#ifndef SOCMAP_DOC2VEC_HPP
#define SOCMAP_DOC2VEC_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "socmap/binio.hpp"
#include "socmap/vectors.hpp"

namespace socmap {

struct EmbedConfig {
    uint32_t dim = 100;
    uint32_t window = 5; // carried in saved configs; the bag model ignores it
    uint32_t epochs = 20;
    uint32_t negative_samples = 5;
    double initial_learning_rate = 0.025;
    double final_learning_rate = 0.0001;
    uint32_t min_token_count = 2;
    uint64_t seed = 1;
};

// Distributed bag-of-words document embedding trained with negative
// sampling. Vectors are stored as float32 so a save/load round trip
// reproduces inference bit for bit.
class DocEmbedder {
public:
    static DocEmbedder fit(std::span<const std::string> texts, const EmbedConfig& cfg);

    // Embeds unseen text against the frozen word table. The generator is
    // reseeded from the stored seed on every call, so equal inputs give
    // equal outputs.
    std::vector<float> infer(const std::string& text) const;

    size_t doc_count() const { return doc_count_; }
    uint32_t dim() const { return cfg_.dim; }
    size_t vocab_size() const { return vocab_.size(); }
    const EmbedConfig& config() const { return cfg_; }
    std::span<const float> doc_vector(size_t i) const {
        return {docs_.data() + i * cfg_.dim, cfg_.dim};
    }
    // Mean negative-sampling loss over a fixed probe subset, one entry per
    // completed epoch.
    const std::vector<double>& epoch_probe_loss() const { return probe_loss_; }

    void save(BinaryWriter& w) const;
    static DocEmbedder load(BinaryReader& r);
    void save_file(const std::string& path) const;
    static DocEmbedder load_file(const std::string& path);

private:
    EmbedConfig cfg_;
    std::vector<std::string> vocab_; // lexicographic order
    std::unordered_map<std::string, uint32_t> token_index_;
    std::vector<uint64_t> counts_;
    std::vector<double> neg_cdf_; // cumulative counts^0.75
    std::vector<float> words_;    // |V| x dim
    std::vector<float> docs_;     // doc_count x dim
    size_t doc_count_ = 0;
    std::vector<double> probe_loss_;

    std::vector<uint32_t> doc_token_ids(const std::string& text) const;
    uint32_t draw_negative(std::mt19937_64& rng) const;
    void rebuild_tables();
};

double cosine_similarity(std::span<const float> a, std::span<const float> b);

DenseVector dense_from_f32(std::span<const float> v);

} // namespace socmap

#endif
