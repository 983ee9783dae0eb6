#include <cmath>
#include <vector>

#include "classifiers_impl.hpp"

namespace socmap::detail {

namespace {

// Primal subgradient descent on the hinge loss with step 1/(lambda*t),
// examples visited in index order. The bias rides along as an extra
// always-one feature, so it shares the regularizer.
std::vector<double> train_binary_hinge(const FeatureMatrix& X,
                                       std::span<const int> y, double lambda,
                                       uint32_t max_epochs) {
    const size_t dim = X.dim();
    std::vector<double> w(dim + 1, 0.0);
    uint64_t t = 0;
    for (uint32_t epoch = 0; epoch < max_epochs; ++epoch) {
        for (size_t i = 0; i < X.rows(); ++i) {
            ++t;
            const double eta = 1.0 / (lambda * double(t));
            VectorView x = X.row(i);
            const double margin = double(y[i]) * (x.dot({w.data(), dim}) + w[dim]);
            const double keep = 1.0 - eta * lambda;
            for (double& wj : w) wj *= keep;
            if (margin < 1.0) {
                x.add_scaled_to({w.data(), dim}, eta * double(y[i]));
                w[dim] += eta * double(y[i]);
            }
        }
    }
    return w;
}

} // namespace

LinearSvmModel fit_linear_svm(const LinearSvmSpec& spec, const FeatureMatrix& X,
                              std::span<const uint32_t> y, uint32_t class_count) {
    const size_t dim = X.dim();
    const double lambda = 1.0 / (double(X.rows()) * spec.c);

    LinearSvmModel m;
    m.class_count = class_count;
    m.dim = uint32_t(dim);
    m.weights.assign(size_t(class_count) * dim, 0.0);
    m.bias.assign(class_count, 0.0);

    std::vector<int> signs(X.rows());
    for (uint32_t c = 0; c < class_count; ++c) {
        for (size_t i = 0; i < X.rows(); ++i) signs[i] = y[i] == c ? 1 : -1;
        std::vector<double> w = train_binary_hinge(X, signs, lambda, spec.max_epochs);
        for (size_t j = 0; j < dim; ++j) m.weights[size_t(c) * dim + j] = w[j];
        m.bias[c] = w[dim];
    }
    return m;
}

uint32_t predict_linear_svm(const LinearSvmModel& m, const VectorView& x) {
    std::vector<double> scores(m.class_count);
    for (uint32_t c = 0; c < m.class_count; ++c) {
        std::span<const double> w{m.weights.data() + size_t(c) * m.dim, m.dim};
        scores[c] = m.bias[c] + x.dot(w);
    }
    return argmax_first(scores);
}

} // namespace socmap::detail
