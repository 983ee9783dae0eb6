#include <cmath>
#include <cstring>
#include <vector>

#include "classifiers_impl.hpp"

namespace socmap {

namespace {

// scores[c] = bias[c] + W_c . x for the packed parameter vector.
void class_scores(std::span<const double> params, uint32_t class_count,
                  uint32_t dim, const VectorView& x, std::vector<double>& scores) {
    scores.resize(class_count);
    for (uint32_t c = 0; c < class_count; ++c) {
        std::span<const double> w = params.subspan(size_t(c) * dim, dim);
        scores[c] = params[size_t(class_count) * dim + c] + x.dot(w);
    }
}

double log_sum_exp(std::span<const double> s) {
    double m = s[0];
    for (double v : s)
        if (v > m) m = v;
    double acc = 0.0;
    for (double v : s) acc += std::exp(v - m);
    return m + std::log(acc);
}

} // namespace

double logreg_objective(const FeatureMatrix& X, std::span<const uint32_t> y,
                        uint32_t class_count, double l2_strength,
                        std::span<const double> params) {
    const size_t n = X.rows();
    const uint32_t dim = uint32_t(X.dim());
    std::vector<double> scores;
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        class_scores(params, class_count, dim, X.row(i), scores);
        loss += log_sum_exp(scores) - scores[y[i]];
    }
    double reg = 0.0;
    for (size_t j = 0; j < size_t(class_count) * dim; ++j) reg += params[j] * params[j];
    return loss / double(n) + l2_strength / (2.0 * double(n)) * reg;
}

std::vector<double> logreg_gradient(const FeatureMatrix& X, std::span<const uint32_t> y,
                                    uint32_t class_count, double l2_strength,
                                    std::span<const double> params) {
    const size_t n = X.rows();
    const uint32_t dim = uint32_t(X.dim());
    std::vector<double> grad(params.size(), 0.0);
    std::vector<double> scores;
    for (size_t i = 0; i < n; ++i) {
        VectorView x = X.row(i);
        class_scores(params, class_count, dim, x, scores);
        std::vector<double> p = softmax(scores);
        for (uint32_t c = 0; c < class_count; ++c) {
            double coeff = p[c] - (c == y[i] ? 1.0 : 0.0);
            if (coeff == 0.0) continue;
            std::span<double> gw{grad.data() + size_t(c) * dim, dim};
            x.add_scaled_to(gw, coeff);
            grad[size_t(class_count) * dim + c] += coeff;
        }
    }
    const double inv_n = 1.0 / double(n);
    for (double& g : grad) g *= inv_n;
    for (size_t j = 0; j < size_t(class_count) * dim; ++j)
        grad[j] += l2_strength * inv_n * params[j];
    return grad;
}

namespace detail {

LogRegModel fit_logreg(const LogRegSpec& spec, const FeatureMatrix& X,
                       std::span<const uint32_t> y, uint32_t class_count) {
    const uint32_t dim = uint32_t(X.dim());
    std::vector<double> params(size_t(class_count) * dim + class_count, 0.0);

    uint32_t iterations = 0;
    double step = 1.0;
    for (; iterations < spec.max_iter; ++iterations) {
        std::vector<double> grad =
            logreg_gradient(X, y, class_count, spec.l2_strength, params);
        double grad_inf = 0.0;
        double grad_sq = 0.0;
        for (double g : grad) {
            grad_inf = std::max(grad_inf, std::fabs(g));
            grad_sq += g * g;
        }
        if (grad_inf < spec.tol) break;

        // Backtracking line search on the steepest-descent direction; the
        // accepted step seeds the next iteration (doubled) so the search can
        // recover from an overly cautious start.
        double f0 = logreg_objective(X, y, class_count, spec.l2_strength, params);
        step = std::min(step * 2.0, 1.0e4);
        std::vector<double> trial(params.size());
        bool moved = false;
        while (step > 1e-20) {
            for (size_t j = 0; j < params.size(); ++j)
                trial[j] = params[j] - step * grad[j];
            double f1 = logreg_objective(X, y, class_count, spec.l2_strength, trial);
            if (f1 <= f0 - 1e-4 * step * grad_sq) {
                params.swap(trial);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break; // no descent step representable; accept the iterate
    }

    LogRegModel m;
    m.class_count = class_count;
    m.dim = dim;
    m.iterations = iterations;
    m.weights.assign(params.begin(), params.begin() + size_t(class_count) * dim);
    m.bias.assign(params.begin() + size_t(class_count) * dim, params.end());
    return m;
}

uint32_t predict_logreg(const LogRegModel& m, const VectorView& x) {
    std::vector<double> scores(m.class_count);
    for (uint32_t c = 0; c < m.class_count; ++c) {
        std::span<const double> w{m.weights.data() + size_t(c) * m.dim, m.dim};
        scores[c] = m.bias[c] + x.dot(w);
    }
    return argmax_first(scores);
}

} // namespace detail
} // namespace socmap
