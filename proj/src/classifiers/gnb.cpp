#include <cmath>
#include <limits>
#include <numbers>

#include "classifiers_impl.hpp"

namespace socmap::detail {

// Per-class feature means and population variances; sparse zeros count as
// observations of 0. Smoothing adds var_smoothing times the largest
// per-feature variance of the whole training matrix.
GnbModel fit_gnb(const GnbSpec& spec, const FeatureMatrix& X,
                 std::span<const uint32_t> y, uint32_t class_count) {
    size_t n = X.rows();
    size_t d = X.dim();
    GnbModel m;
    m.class_count = class_count;
    m.dim = static_cast<uint32_t>(d);
    m.means.assign(class_count * d, 0.0);
    m.variances.assign(class_count * d, 0.0);

    std::vector<size_t> counts(class_count, 0);
    for (uint32_t label : y) ++counts[label];

    // sums and sums of squares over nonzero entries; zeros contribute
    // nothing to either.
    std::vector<double> sum(class_count * d, 0.0), sumsq(class_count * d, 0.0);
    std::vector<double> gsum(d, 0.0), gsumsq(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
        VectorView r = X.row(i);
        size_t base = y[i] * d;
        if (r.is_sparse()) {
            auto idx = r.indices();
            auto val = r.values();
            for (size_t k = 0; k < idx.size(); ++k) {
                sum[base + idx[k]] += val[k];
                sumsq[base + idx[k]] += val[k] * val[k];
                gsum[idx[k]] += val[k];
                gsumsq[idx[k]] += val[k] * val[k];
            }
        } else {
            auto val = r.values();
            for (size_t j = 0; j < d; ++j) {
                sum[base + j] += val[j];
                sumsq[base + j] += val[j] * val[j];
                gsum[j] += val[j];
                gsumsq[j] += val[j] * val[j];
            }
        }
    }

    double max_global_var = 0.0;
    for (size_t j = 0; j < d; ++j) {
        double mean = gsum[j] / n;
        double var = gsumsq[j] / n - mean * mean;
        if (var > max_global_var) max_global_var = var;
    }
    double epsilon = spec.var_smoothing * max_global_var;

    m.log_priors.assign(class_count, -std::numeric_limits<double>::infinity());
    for (uint32_t c = 0; c < class_count; ++c) {
        if (counts[c] == 0) continue; // class absent from training data
        m.log_priors[c] = std::log(static_cast<double>(counts[c]) / n);
        for (size_t j = 0; j < d; ++j) {
            double mean = sum[c * d + j] / counts[c];
            double var = sumsq[c * d + j] / counts[c] - mean * mean;
            var += epsilon;
            if (var < 1e-300) var = 1e-300;
            m.means[c * d + j] = mean;
            m.variances[c * d + j] = var;
        }
    }
    return m;
}

uint32_t predict_gnb(const GnbModel& m, const VectorView& x) {
    size_t d = m.dim;
    std::vector<double> score(m.class_count);
    for (uint32_t c = 0; c < m.class_count; ++c) {
        double s = m.log_priors[c];
        if (std::isinf(s)) {
            score[c] = s;
            continue;
        }
        const double* mu = m.means.data() + c * d;
        const double* var = m.variances.data() + c * d;
        for (size_t j = 0; j < d; ++j) {
            double diff = x.value_at(j) - mu[j];
            s += -0.5 * std::log(2.0 * std::numbers::pi * var[j]) -
                 diff * diff / (2.0 * var[j]);
        }
        score[c] = s;
    }
    return argmax_first(score);
}

} // namespace socmap::detail
