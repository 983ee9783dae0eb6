#ifndef SOCMAP_CLASSIFIERS_HPP
#define SOCMAP_CLASSIFIERS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "socmap/vectors.hpp"

namespace socmap {

enum class Algorithm { knn, gnb, logreg, linear_svm, svc_rbf, tree, forest };

const std::vector<Algorithm>& all_algorithms();
std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct KnnSpec {
    uint32_t k = 3;
};

struct GnbSpec {
    // Added to every variance, scaled by the largest per-feature variance.
    double var_smoothing = 1e-9;
};

struct LogRegSpec {
    double l2_strength = 1.0; // lambda
    uint32_t max_iter = 200;
    double tol = 1e-6; // on the gradient infinity norm
};

struct LinearSvmSpec {
    double c = 1.0;
    uint32_t max_epochs = 50;
};

struct SvcRbfSpec {
    double c = 1.0;
    double gamma = 0.0; // 0 means "scale": 1 / (dim * mean feature variance)
    double tol = 1e-3;
    uint32_t max_passes = 500;
};

struct TreeSpec {
    uint32_t min_samples_split = 2;
    uint32_t max_depth = 0; // 0 = unlimited
};

struct ForestSpec {
    uint32_t n_estimators = 100;
    bool bootstrap = true;
    uint32_t features_per_split = 0; // 0 = ceil(sqrt(dim))
    TreeSpec tree;
};

// Algorithm tag plus the per-algorithm hyperparameter records; only the
// record matching `algorithm` is read.
struct ClassifierSpec {
    Algorithm algorithm = Algorithm::knn;
    uint64_t seed = 0;
    KnnSpec knn;
    GnbSpec gnb;
    LogRegSpec logreg;
    LinearSvmSpec linear_svm;
    SvcRbfSpec svc_rbf;
    TreeSpec tree;
    ForestSpec forest;
};

ClassifierSpec default_spec(Algorithm a, uint64_t seed = 0);

// ---- trained models ----

struct KnnModel {
    uint32_t k = 3;
    FeatureMatrix train;
    std::vector<uint32_t> labels;
    uint32_t class_count = 0;
};

struct GnbModel {
    std::vector<double> log_priors; // C
    std::vector<double> means;      // C x dim, row-major
    std::vector<double> variances;  // C x dim, smoothed
    uint32_t class_count = 0;
    uint32_t dim = 0;
};

struct LogRegModel {
    std::vector<double> weights; // C x dim, row-major
    std::vector<double> bias;    // C
    uint32_t class_count = 0;
    uint32_t dim = 0;
    uint32_t iterations = 0;
};

struct LinearSvmModel {
    std::vector<double> weights; // C x dim, one-vs-rest
    std::vector<double> bias;    // C
    uint32_t class_count = 0;
    uint32_t dim = 0;
};

struct SvcRbfModel {
    struct Binary {
        uint32_t class_a = 0; // positive side of the decision function
        uint32_t class_b = 0;
        FeatureMatrix support;
        std::vector<double> coef; // alpha_i * y_i per support vector
        double bias = 0.0;
        bool converged = true;
    };
    double gamma = 0.0;
    uint32_t class_count = 0;
    uint32_t dim = 0;
    std::vector<Binary> pairs; // one per unordered class pair, a < b
};

struct TreeNode {
    int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    uint32_t left = 0;
    uint32_t right = 0;
    std::vector<uint32_t> counts; // leaf class distribution
};

struct TreeModel {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    uint32_t class_count = 0;
    uint32_t dim = 0;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    uint32_t class_count = 0;
    uint32_t dim = 0;
};

using TrainedClassifier = std::variant<KnnModel, GnbModel, LogRegModel,
                                       LinearSvmModel, SvcRbfModel, TreeModel,
                                       ForestModel>;

Algorithm algorithm_of(const TrainedClassifier& m);
uint32_t class_count_of(const TrainedClassifier& m);
uint32_t dim_of(const TrainedClassifier& m);

TrainedClassifier fit_classifier(const ClassifierSpec& spec, const FeatureMatrix& X,
                                 std::span<const uint32_t> y);
uint32_t predict(const TrainedClassifier& m, const VectorView& x);
std::vector<uint32_t> predict_all(const TrainedClassifier& m, const FeatureMatrix& X);

// ---- building blocks ----

double rbf_kernel(const VectorView& x, const VectorView& z, double gamma);

// Dense symmetric kernel matrix.
class KernelMatrix {
public:
    KernelMatrix() = default;
    explicit KernelMatrix(size_t n) : n_(n), data_(n * n, 0.0) {}
    size_t order() const { return n_; }
    double at(size_t i, size_t j) const { return data_[i * n_ + j]; }
    void set(size_t i, size_t j, double v) {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }

private:
    size_t n_ = 0;
    std::vector<double> data_;
};

KernelMatrix rbf_kernel_matrix(const FeatureMatrix& X, double gamma);

struct SmoResult {
    std::vector<double> alpha;
    double bias = 0.0;
    bool converged = true;
    uint32_t passes = 0;
};

// Sequential minimal optimization on the dual with box constraint
// 0 <= alpha_i <= C. On return, either every KKT condition holds within
// tol or `converged` is false and the last iterate is returned.
SmoResult smo_solve(const KernelMatrix& K, std::span<const int> y, double C,
                    double tol, uint32_t max_passes = 500);

// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double smo_dual_objective(const KernelMatrix& K, std::span<const int> y,
                          std::span<const double> alpha);

double gini_impurity(std::span<const uint32_t> counts);

struct Split {
    uint32_t feature = 0;
    double threshold = 0.0;
};

// Minimizes weighted child Gini over midpoint thresholds of the features in
// `feature_subset`; nullopt when no split strictly reduces impurity. Ties
// resolve to the lower feature index, then the lower threshold.
std::optional<Split> best_split(const FeatureMatrix& X, std::span<const uint32_t> y,
                                std::span<const uint32_t> feature_subset);

// Softmax with max-subtraction; exposed for the probability-simplex checks.
std::vector<double> softmax(std::span<const double> scores);

// Regularized mean negative log-likelihood of the multinomial model and its
// analytic gradient. Parameters are packed [W row-major C x dim, bias C].
// Exposed so the gradient can be checked against finite differences.
double logreg_objective(const FeatureMatrix& X, std::span<const uint32_t> y,
                        uint32_t class_count, double l2_strength,
                        std::span<const double> params);
std::vector<double> logreg_gradient(const FeatureMatrix& X, std::span<const uint32_t> y,
                                    uint32_t class_count, double l2_strength,
                                    std::span<const double> params);

} // namespace socmap

#endif
