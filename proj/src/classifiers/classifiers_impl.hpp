#ifndef SOCMAP_CLASSIFIERS_IMPL_HPP
#define SOCMAP_CLASSIFIERS_IMPL_HPP

#include <span>

#include "socmap/classifiers.hpp"

namespace socmap::detail {

// Per-algorithm trainers. Inputs are pre-validated by fit_classifier:
// non-empty, finite, labels in [0, class_count).
KnnModel fit_knn(const KnnSpec& spec, const FeatureMatrix& X,
                 std::span<const uint32_t> y, uint32_t class_count);
GnbModel fit_gnb(const GnbSpec& spec, const FeatureMatrix& X,
                 std::span<const uint32_t> y, uint32_t class_count);
LogRegModel fit_logreg(const LogRegSpec& spec, const FeatureMatrix& X,
                       std::span<const uint32_t> y, uint32_t class_count);
LinearSvmModel fit_linear_svm(const LinearSvmSpec& spec, const FeatureMatrix& X,
                              std::span<const uint32_t> y, uint32_t class_count);
SvcRbfModel fit_svc_rbf(const SvcRbfSpec& spec, const FeatureMatrix& X,
                        std::span<const uint32_t> y, uint32_t class_count);
TreeModel fit_tree(const TreeSpec& spec, const FeatureMatrix& X,
                   std::span<const uint32_t> y, uint32_t class_count);
ForestModel fit_forest(const ForestSpec& spec, uint64_t seed, const FeatureMatrix& X,
                       std::span<const uint32_t> y, uint32_t class_count);

uint32_t predict_knn(const KnnModel& m, const VectorView& x);
uint32_t predict_gnb(const GnbModel& m, const VectorView& x);
uint32_t predict_logreg(const LogRegModel& m, const VectorView& x);
uint32_t predict_linear_svm(const LinearSvmModel& m, const VectorView& x);
uint32_t predict_svc_rbf(const SvcRbfModel& m, const VectorView& x);
uint32_t predict_tree(const TreeModel& m, const VectorView& x);
uint32_t predict_forest(const ForestModel& m, const VectorView& x);

// Column-major copy of X used by the tree trainers.
std::vector<std::vector<double>> densify_columns(const FeatureMatrix& X);

inline uint32_t argmax_first(std::span<const double> scores) {
    uint32_t best = 0;
    for (uint32_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

} // namespace socmap::detail

#endif
