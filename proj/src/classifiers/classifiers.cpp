#include "socmap/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "classifiers_impl.hpp"
#include "socmap/error.hpp"

namespace socmap {

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> algos = {
        Algorithm::knn,       Algorithm::gnb,     Algorithm::logreg,
        Algorithm::linear_svm, Algorithm::svc_rbf, Algorithm::tree,
        Algorithm::forest};
    return algos;
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::knn: return "knn";
        case Algorithm::gnb: return "gnb";
        case Algorithm::logreg: return "logreg";
        case Algorithm::linear_svm: return "linear_svm";
        case Algorithm::svc_rbf: return "svc_rbf";
        case Algorithm::tree: return "tree";
        case Algorithm::forest: return "forest";
    }
    throw InternalError("algorithm_name: bad enum value");
}

Algorithm parse_algorithm(const std::string& name) {
    for (Algorithm a : all_algorithms())
        if (algorithm_name(a) == name) return a;
    throw UsageError("unknown algorithm '" + name +
                     "' (expected knn, gnb, logreg, linear_svm, svc_rbf, tree or forest)");
}

ClassifierSpec default_spec(Algorithm a, uint64_t seed) {
    ClassifierSpec spec;
    spec.algorithm = a;
    spec.seed = seed;
    return spec;
}

Algorithm algorithm_of(const TrainedClassifier& m) {
    return static_cast<Algorithm>(m.index());
}

uint32_t class_count_of(const TrainedClassifier& m) {
    return std::visit([](const auto& v) { return v.class_count; }, m);
}

uint32_t dim_of(const TrainedClassifier& m) {
    return std::visit(
        [](const auto& v) -> uint32_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, KnnModel>)
                return static_cast<uint32_t>(v.train.dim());
            else
                return v.dim;
        },
        m);
}

TrainedClassifier fit_classifier(const ClassifierSpec& spec, const FeatureMatrix& X,
                                 std::span<const uint32_t> y) {
    if (X.rows() == 0 || y.empty())
        throw DataError("fit_classifier: empty training set");
    if (X.rows() != y.size())
        throw DataError("fit_classifier: row/label count mismatch");
    X.check_finite();
    uint32_t class_count = *std::max_element(y.begin(), y.end()) + 1;

    switch (spec.algorithm) {
        case Algorithm::knn:
            return detail::fit_knn(spec.knn, X, y, class_count);
        case Algorithm::gnb:
            return detail::fit_gnb(spec.gnb, X, y, class_count);
        case Algorithm::logreg:
            return detail::fit_logreg(spec.logreg, X, y, class_count);
        case Algorithm::linear_svm:
            return detail::fit_linear_svm(spec.linear_svm, X, y, class_count);
        case Algorithm::svc_rbf:
            return detail::fit_svc_rbf(spec.svc_rbf, X, y, class_count);
        case Algorithm::tree:
            return detail::fit_tree(spec.tree, X, y, class_count);
        case Algorithm::forest:
            return detail::fit_forest(spec.forest, spec.seed, X, y, class_count);
    }
    throw InternalError("fit_classifier: bad algorithm enum");
}

uint32_t predict(const TrainedClassifier& m, const VectorView& x) {
    if (x.dim() != dim_of(m))
        throw DataError("predict: feature dimension mismatch");
    return std::visit(
        [&](const auto& v) -> uint32_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, KnnModel>)
                return detail::predict_knn(v, x);
            else if constexpr (std::is_same_v<T, GnbModel>)
                return detail::predict_gnb(v, x);
            else if constexpr (std::is_same_v<T, LogRegModel>)
                return detail::predict_logreg(v, x);
            else if constexpr (std::is_same_v<T, LinearSvmModel>)
                return detail::predict_linear_svm(v, x);
            else if constexpr (std::is_same_v<T, SvcRbfModel>)
                return detail::predict_svc_rbf(v, x);
            else if constexpr (std::is_same_v<T, TreeModel>)
                return detail::predict_tree(v, x);
            else
                return detail::predict_forest(v, x);
        },
        m);
}

std::vector<uint32_t> predict_all(const TrainedClassifier& m, const FeatureMatrix& X) {
    std::vector<uint32_t> out;
    out.reserve(X.rows());
    for (size_t i = 0; i < X.rows(); ++i) out.push_back(predict(m, X.row(i)));
    return out;
}

std::vector<double> softmax(std::span<const double> scores) {
    std::vector<double> p(scores.begin(), scores.end());
    double mx = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (double& v : p) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

namespace detail {

std::vector<std::vector<double>> densify_columns(const FeatureMatrix& X) {
    std::vector<std::vector<double>> cols(X.dim());
    for (size_t j = 0; j < X.dim(); ++j) cols[j].assign(X.rows(), 0.0);
    for (size_t i = 0; i < X.rows(); ++i) {
        VectorView r = X.row(i);
        if (r.is_sparse()) {
            auto idx = r.indices();
            auto val = r.values();
            for (size_t k = 0; k < idx.size(); ++k) cols[idx[k]][i] = val[k];
        } else {
            auto val = r.values();
            for (size_t j = 0; j < val.size(); ++j) cols[j][i] = val[j];
        }
    }
    return cols;
}

} // namespace detail

} // namespace socmap
