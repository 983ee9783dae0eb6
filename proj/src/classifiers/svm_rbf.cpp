#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "classifiers_impl.hpp"

namespace socmap {

double rbf_kernel(const VectorView& x, const VectorView& z, double gamma) {
    return std::exp(-gamma * squared_distance(x, z));
}

KernelMatrix rbf_kernel_matrix(const FeatureMatrix& X, double gamma) {
    const size_t n = X.rows();
    KernelMatrix K(n);
    for (size_t i = 0; i < n; ++i) {
        K.set(i, i, 1.0);
        VectorView xi = X.row(i);
        for (size_t j = i + 1; j < n; ++j)
            K.set(i, j, rbf_kernel(xi, X.row(j), gamma));
    }
    return K;
}

double smo_dual_objective(const KernelMatrix& K, std::span<const int> y,
                          std::span<const double> alpha) {
    double obj = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        obj += alpha[i];
        if (alpha[i] == 0.0) continue;
        for (size_t j = 0; j < alpha.size(); ++j) {
            if (alpha[j] == 0.0) continue;
            obj -= 0.5 * alpha[i] * alpha[j] * double(y[i] * y[j]) * K.at(i, j);
        }
    }
    return obj;
}

namespace {

// Working-set SMO on the dual. Decision values use f(x) = sum_i alpha_i
// y_i K(x_i, x) + b; the error cache holds E_i = f(x_i) - y_i and is
// updated incrementally after every accepted step, then rebuilt from
// scratch at the start of each full sweep. Partner selection follows the
// classic three-stage heuristic, with rotating start positions instead of
// random ones so runs are reproducible.
class SmoSolver {
public:
    SmoSolver(const KernelMatrix& K, std::span<const int> y, double C, double tol)
        : K_(K), y_(y), C_(C), tol_(tol), n_(y.size()), alpha_(y.size(), 0.0),
          E_(y.size(), 0.0) {}

    SmoResult run(uint32_t max_passes) {
        bool examine_all = true;
        size_t changed = 0;
        uint32_t passes = 0;
        bool converged = false;
        while (passes < max_passes) {
            ++passes;
            changed = 0;
            if (examine_all) {
                refresh_errors();
                for (size_t i = 0; i < n_; ++i) changed += examine(i);
                if (changed == 0) {
                    converged = true;
                    recalibrate_bias();
                    break;
                }
                examine_all = false;
            } else {
                for (size_t i = 0; i < n_; ++i)
                    if (is_unbound(i)) changed += examine(i);
                if (changed == 0) examine_all = true;
            }
        }
        SmoResult r;
        r.alpha = std::move(alpha_);
        r.bias = b_;
        r.converged = converged;
        r.passes = passes;
        return r;
    }

private:
    static constexpr double kStepEps = 1e-8; // minimum relative alpha movement
    static constexpr double kObjEps = 1e-12;

    bool is_unbound(size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < C_; }

    void refresh_errors() {
        for (size_t i = 0; i < n_; ++i) {
            double f = b_;
            for (size_t j = 0; j < n_; ++j)
                if (alpha_[j] != 0.0) f += alpha_[j] * double(y_[j]) * K_.at(j, i);
            E_[i] = f - double(y_[i]);
        }
    }

    // The per-step bias heuristic tracks pair updates, but nothing ties its
    // final value to the finished iterate: when every multiplier ends up on a
    // box corner the set of biases consistent with the KKT system is a whole
    // interval, and the last step's midpoint can sit outside it. Rebuild b
    // from the bound structure instead. g_i = b - E_i is the bias that puts
    // x_i exactly on its margin; each point turns that into a one-sided (or,
    // for unbound multipliers, two-sided) constraint on b.
    void recalibrate_bias() {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        const double eps = 1e-9 * std::max(1.0, C_);
        for (size_t i = 0; i < n_; ++i) {
            const double g = b_ - E_[i];
            const bool at_zero = alpha_[i] <= eps;
            const bool at_c = alpha_[i] >= C_ - eps;
            if (!at_zero && !at_c) {
                lo = std::max(lo, g);
                hi = std::min(hi, g);
            } else if ((at_zero && y_[i] > 0) || (at_c && y_[i] < 0)) {
                lo = std::max(lo, g);
            } else {
                hi = std::min(hi, g);
            }
        }
        if (std::isinf(lo) && std::isinf(hi)) return;
        if (std::isinf(lo)) b_ = hi;
        else if (std::isinf(hi)) b_ = lo;
        else b_ = 0.5 * (lo + hi);
    }

    size_t examine(size_t i2) {
        const double r2 = E_[i2] * double(y_[i2]);
        const bool violates = (r2 < -tol_ && alpha_[i2] < C_) ||
                              (r2 > tol_ && alpha_[i2] > 0.0);
        if (!violates) return 0;

        // 1) the unbound partner with the largest |E1 - E2|
        size_t best = n_;
        double best_gap = -1.0;
        for (size_t j = 0; j < n_; ++j) {
            if (j == i2 || !is_unbound(j)) continue;
            double gap = std::fabs(E_[j] - E_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        // 2) remaining unbound points, rotating start
        for (size_t k = 0; k < n_; ++k) {
            size_t j = (rot_unbound_ + k) % n_;
            if (j == i2 || !is_unbound(j)) continue;
            if (take_step(j, i2)) {
                rot_unbound_ = (j + 1) % n_;
                return 1;
            }
        }
        // 3) the whole training set, rotating start
        for (size_t k = 0; k < n_; ++k) {
            size_t j = (rot_all_ + k) % n_;
            if (j == i2) continue;
            if (take_step(j, i2)) {
                rot_all_ = (j + 1) % n_;
                return 1;
            }
        }
        return 0;
    }

    bool take_step(size_t i1, size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = double(y_[i1]), y2 = double(y_[i2]);
        const double E1 = E_[i1], E2 = E_[i2];
        const double s = y1 * y2;

        double L, H;
        if (y_[i1] != y_[i2]) {
            L = std::max(0.0, a2 - a1);
            H = std::min(C_, C_ + a2 - a1);
        } else {
            L = std::max(0.0, a1 + a2 - C_);
            H = std::min(C_, a1 + a2);
        }
        if (L >= H) return false;

        const double k11 = K_.at(i1, i1), k22 = K_.at(i2, i2), k12 = K_.at(i1, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2_new;
        if (eta > 1e-12) {
            a2_new = a2 + y2 * (E1 - E2) / eta;
            if (a2_new < L)
                a2_new = L;
            else if (a2_new > H)
                a2_new = H;
        } else {
            // Flat direction: compare the constrained objective at both ends.
            const double v1 = E1 + y1 - b_ - y1 * a1 * k11 - y2 * a2 * k12;
            const double v2 = E2 + y2 - b_ - y1 * a1 * k12 - y2 * a2 * k22;
            auto psi = [&](double t2) {
                double t1 = a1 + s * (a2 - t2);
                return 0.5 * k11 * t1 * t1 + 0.5 * k22 * t2 * t2 +
                       s * k12 * t1 * t2 + y1 * t1 * v1 + y2 * t2 * v2 - t1 - t2;
            };
            const double lo = psi(L), hi = psi(H);
            if (lo < hi - kObjEps)
                a2_new = L;
            else if (lo > hi + kObjEps)
                a2_new = H;
            else
                return false;
        }
        if (std::fabs(a2_new - a2) < kStepEps * (a2_new + a2 + kStepEps)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        if (a1_new < 0.0)
            a1_new = 0.0;
        else if (a1_new > C_)
            a1_new = C_;

        const double d1 = a1_new - a1, d2 = a2_new - a2;
        const double b1 = b_ - E1 - y1 * d1 * k11 - y2 * d2 * k12;
        const double b2 = b_ - E2 - y1 * d1 * k12 - y2 * d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < C_)
            b_new = b1;
        else if (a2_new > 0.0 && a2_new < C_)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);
        const double db = b_new - b_;

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        b_ = b_new;
        for (size_t i = 0; i < n_; ++i)
            E_[i] += y1 * d1 * K_.at(i1, i) + y2 * d2 * K_.at(i2, i) + db;
        return true;
    }

    const KernelMatrix& K_;
    std::span<const int> y_;
    double C_;
    double tol_;
    size_t n_;
    std::vector<double> alpha_;
    std::vector<double> E_;
    double b_ = 0.0;
    size_t rot_unbound_ = 0;
    size_t rot_all_ = 0;
};

} // namespace

SmoResult smo_solve(const KernelMatrix& K, std::span<const int> y, double C,
                    double tol, uint32_t max_passes) {
    return SmoSolver(K, y, C, tol).run(max_passes);
}

namespace detail {

namespace {

double scale_gamma(const FeatureMatrix& X) {
    const size_t n = X.rows();
    const size_t d = X.dim();
    std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
        VectorView r = X.row(i);
        if (r.is_sparse()) {
            auto idx = r.indices();
            auto val = r.values();
            for (size_t k = 0; k < idx.size(); ++k) {
                sum[idx[k]] += val[k];
                sumsq[idx[k]] += val[k] * val[k];
            }
        } else {
            auto val = r.values();
            for (size_t j = 0; j < d; ++j) {
                sum[j] += val[j];
                sumsq[j] += val[j] * val[j];
            }
        }
    }
    double mean_var = 0.0;
    for (size_t j = 0; j < d; ++j) {
        double mu = sum[j] / double(n);
        mean_var += sumsq[j] / double(n) - mu * mu;
    }
    mean_var /= double(d);
    if (!(mean_var > 0.0)) return 1.0;
    return 1.0 / (double(d) * mean_var);
}

} // namespace

SvcRbfModel fit_svc_rbf(const SvcRbfSpec& spec, const FeatureMatrix& X,
                        std::span<const uint32_t> y, uint32_t class_count) {
    SvcRbfModel m;
    m.class_count = class_count;
    m.dim = uint32_t(X.dim());
    m.gamma = spec.gamma > 0.0 ? spec.gamma : scale_gamma(X);

    const KernelMatrix K = rbf_kernel_matrix(X, m.gamma);

    for (uint32_t a = 0; a + 1 < class_count; ++a) {
        for (uint32_t b = a + 1; b < class_count; ++b) {
            std::vector<size_t> members;
            std::vector<int> signs;
            for (size_t i = 0; i < X.rows(); ++i) {
                if (y[i] == a) {
                    members.push_back(i);
                    signs.push_back(1);
                } else if (y[i] == b) {
                    members.push_back(i);
                    signs.push_back(-1);
                }
            }
            KernelMatrix sub(members.size());
            for (size_t i = 0; i < members.size(); ++i)
                for (size_t j = i; j < members.size(); ++j)
                    sub.set(i, j, K.at(members[i], members[j]));

            SmoResult sol = smo_solve(sub, signs, spec.c, spec.tol, spec.max_passes);

            SvcRbfModel::Binary bin;
            bin.class_a = a;
            bin.class_b = b;
            bin.bias = sol.bias;
            bin.converged = sol.converged;
            std::vector<size_t> kept;
            for (size_t i = 0; i < members.size(); ++i) {
                if (sol.alpha[i] > 0.0) {
                    kept.push_back(members[i]);
                    bin.coef.push_back(sol.alpha[i] * double(signs[i]));
                }
            }
            bin.support = FeatureMatrix::gather(X, kept);
            m.pairs.push_back(std::move(bin));
        }
    }
    return m;
}

uint32_t predict_svc_rbf(const SvcRbfModel& m, const VectorView& x) {
    if (m.pairs.empty()) return 0;
    std::vector<uint32_t> votes(m.class_count, 0);
    for (const auto& bin : m.pairs) {
        double f = bin.bias;
        for (size_t i = 0; i < bin.coef.size(); ++i)
            f += bin.coef[i] * rbf_kernel(bin.support.row(i), x, m.gamma);
        ++votes[f > 0.0 ? bin.class_a : bin.class_b];
    }
    uint32_t best = 0;
    for (uint32_t c = 1; c < m.class_count; ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

} // namespace detail
} // namespace socmap
