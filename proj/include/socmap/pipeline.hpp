#ifndef SOCMAP_PIPELINE_HPP
#define SOCMAP_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "socmap/classifiers.hpp"
#include "socmap/corpus.hpp"
#include "socmap/doc2vec.hpp"
#include "socmap/evaluation.hpp"
#include "socmap/tfidf.hpp"

namespace socmap {

struct PipelineMeta {
    std::string model_version; // deterministic digest of what was trained on
    std::string dataset_fingerprint;
    uint64_t training_rows = 0;
    uint32_t feature_dim = 0;
    uint32_t class_count = 0;
    int64_t created_unix = 0; // honors SOURCE_DATE_EPOCH for repeatable files
};

// A fitted vectorizer plus a trained classifier plus the label map,
// end-to-end: text in, label out. Persisted as a single container file
// with a JSON manifest and checksummed payload blocks.
class Pipeline {
public:
    static Pipeline train(const Dataset& data, Representation rep,
                          const ClassifierSpec& spec, const VectorizerConfig& tf_cfg,
                          const EmbedConfig& em_cfg);

    std::string predict_one(const std::string& description) const;

    Representation representation() const { return rep_; }
    Algorithm algorithm() const { return algorithm_of(classifier()); }
    const PipelineMeta& meta() const { return meta_; }
    const LabelMap& labels() const { return labels_; }
    const TrainedClassifier& classifier() const { return *clf_; }

    void save(const std::string& path) const;
    static Pipeline load(const std::string& path);

private:
    PipelineMeta meta_;
    Representation rep_ = Representation::tfidf;
    LabelMap labels_;
    std::optional<TfidfModel> tfidf_;
    std::optional<DocEmbedder> embedder_;
    std::optional<TrainedClassifier> clf_;
};

} // namespace socmap

#endif
