#ifndef SOCMAP_EVALUATION_HPP
#define SOCMAP_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "socmap/classifiers.hpp"
#include "socmap/corpus.hpp"
#include "socmap/doc2vec.hpp"
#include "socmap/tfidf.hpp"

namespace socmap {

enum class Representation { tfidf, doc2vec };

const std::vector<Representation>& all_representations();
std::string representation_name(Representation r);
Representation parse_representation(const std::string& name);

struct FoldMetrics {
    uint32_t fold = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double train_time_s = 0.0; // feature fitting plus classifier fitting
};

// One benchmark row: a (representation, algorithm) pair with its
// cross-validation trace.
struct EvalRow {
    Representation representation = Representation::tfidf;
    Algorithm algorithm = Algorithm::knn;
    std::vector<FoldMetrics> folds;
    bool failed = false;
    std::string error;

    double mean(double FoldMetrics::*field) const;
    double stddev(double FoldMetrics::*field) const; // population
};

struct BenchmarkReport {
    size_t dataset_size = 0;
    uint32_t class_count = 0;
    uint32_t fold_count = 0;
    uint64_t seed = 0;
    std::string dataset_fingerprint;
    std::vector<EvalRow> rows; // representation-major, algorithm order within
};

// Per-fold feature matrices. The vectorizer is fitted on the training
// slice alone; test rows are transformed (or inferred) against it, so no
// test-side statistics can leak into the features.
struct FoldFeatures {
    FeatureMatrix train;
    FeatureMatrix test;
    double fit_seconds = 0.0; // vectorizer fit + training-side transform
};

FoldFeatures fit_fold_features(Representation rep, const Dataset& data,
                               const FoldSplit& split, const VectorizerConfig& tf_cfg,
                               const EmbedConfig& em_cfg);

// K-fold evaluation of one (representation, algorithm) pair. Throws
// DataError if any fold's training slice loses a label outright.
EvalRow cross_validate(Representation rep, const ClassifierSpec& spec,
                       const Dataset& data, const CvConfig& cv,
                       const VectorizerConfig& tf_cfg, const EmbedConfig& em_cfg);

// The full matrix: every representation crossed with every algorithm,
// sharing per-fold features (and their measured fitting time) across
// algorithms. A failing row is recorded and the rest continue.
BenchmarkReport benchmark_all(const Dataset& data, const CvConfig& cv, uint64_t seed,
                              const VectorizerConfig& tf_cfg, const EmbedConfig& em_cfg);

// Writes report.csv, folds.csv, report.json and five grouped-bar SVG
// charts (accuracy, precision, recall, f1, train_time) into out_dir.
void emit_report(const BenchmarkReport& report, const std::string& out_dir);

} // namespace socmap

#endif
