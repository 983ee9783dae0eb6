#include "socmap/vectors.hpp"

#include <cmath>

namespace socmap {

double VectorView::dot(std::span<const double> w) const {
    double s = 0.0;
    if (sparse_) {
        for (size_t k = 0; k < indices_.size(); ++k)
            s += values_[k] * w[indices_[k]];
    } else {
        for (size_t j = 0; j < values_.size(); ++j)
            s += values_[j] * w[j];
    }
    return s;
}

double VectorView::squared_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
}

void VectorView::add_scaled_to(std::span<double> acc, double scale) const {
    if (sparse_) {
        for (size_t k = 0; k < indices_.size(); ++k)
            acc[indices_[k]] += scale * values_[k];
    } else {
        for (size_t j = 0; j < values_.size(); ++j)
            acc[j] += scale * values_[j];
    }
}

double VectorView::value_at(size_t col) const {
    if (!sparse_) return values_[col];
    size_t lo = 0, hi = indices_.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (indices_[mid] < col)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < indices_.size() && indices_[lo] == col) return values_[lo];
    return 0.0;
}

double squared_distance(const VectorView& a, const VectorView& b) {
    if (a.dim() != b.dim())
        throw DataError("squared_distance: dimension mismatch");
    double s = 0.0;
    if (a.is_sparse() && b.is_sparse()) {
        auto ai = a.indices();
        auto av = a.values();
        auto bi = b.indices();
        auto bv = b.values();
        size_t i = 0, j = 0;
        while (i < ai.size() && j < bi.size()) {
            if (ai[i] == bi[j]) {
                double d = av[i] - bv[j];
                s += d * d;
                ++i;
                ++j;
            } else if (ai[i] < bi[j]) {
                s += av[i] * av[i];
                ++i;
            } else {
                s += bv[j] * bv[j];
                ++j;
            }
        }
        for (; i < ai.size(); ++i) s += av[i] * av[i];
        for (; j < bi.size(); ++j) s += bv[j] * bv[j];
    } else if (!a.is_sparse() && !b.is_sparse()) {
        auto av = a.values();
        auto bv = b.values();
        for (size_t j = 0; j < av.size(); ++j) {
            double d = av[j] - bv[j];
            s += d * d;
        }
    } else {
        const VectorView& sp = a.is_sparse() ? a : b;
        const VectorView& de = a.is_sparse() ? b : a;
        auto si = sp.indices();
        auto sv = sp.values();
        auto dv = de.values();
        size_t k = 0;
        for (size_t j = 0; j < dv.size(); ++j) {
            double sval = 0.0;
            if (k < si.size() && si[k] == j) sval = sv[k++];
            double d = sval - dv[j];
            s += d * d;
        }
    }
    return s;
}

FeatureMatrix FeatureMatrix::from_sparse(std::vector<SparseVector> rows, size_t dim) {
    FeatureMatrix m;
    m.sparse_ = true;
    m.row_count_ = rows.size();
    m.dim_ = dim;
    m.row_start_.reserve(rows.size() + 1);
    m.row_start_.push_back(0);
    size_t total = 0;
    for (const auto& r : rows) total += r.nnz();
    m.sp_indices_.reserve(total);
    m.sp_values_.reserve(total);
    for (const auto& r : rows) {
        if (r.dim != dim)
            throw DataError("FeatureMatrix: sparse row dim mismatch");
        m.sp_indices_.insert(m.sp_indices_.end(), r.indices.begin(), r.indices.end());
        m.sp_values_.insert(m.sp_values_.end(), r.values.begin(), r.values.end());
        m.row_start_.push_back(m.sp_indices_.size());
    }
    return m;
}

FeatureMatrix FeatureMatrix::from_dense(std::vector<DenseVector> rows, size_t dim) {
    FeatureMatrix m;
    m.sparse_ = false;
    m.row_count_ = rows.size();
    m.dim_ = dim;
    m.dense_.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        if (r.size() != dim)
            throw DataError("FeatureMatrix: dense row dim mismatch");
        m.dense_.insert(m.dense_.end(), r.values.begin(), r.values.end());
    }
    return m;
}

FeatureMatrix FeatureMatrix::gather(const FeatureMatrix& src, std::span<const size_t> rows) {
    FeatureMatrix m;
    m.sparse_ = src.sparse_;
    m.row_count_ = rows.size();
    m.dim_ = src.dim_;
    if (src.sparse_) {
        m.row_start_.reserve(rows.size() + 1);
        m.row_start_.push_back(0);
        for (size_t r : rows) {
            size_t s = src.row_start_[r], e = src.row_start_[r + 1];
            m.sp_indices_.insert(m.sp_indices_.end(), src.sp_indices_.begin() + s,
                                 src.sp_indices_.begin() + e);
            m.sp_values_.insert(m.sp_values_.end(), src.sp_values_.begin() + s,
                                src.sp_values_.begin() + e);
            m.row_start_.push_back(m.sp_indices_.size());
        }
    } else {
        m.dense_.reserve(rows.size() * src.dim_);
        for (size_t r : rows) {
            const double* p = src.dense_.data() + r * src.dim_;
            m.dense_.insert(m.dense_.end(), p, p + src.dim_);
        }
    }
    return m;
}

VectorView FeatureMatrix::row(size_t i) const {
    if (sparse_) {
        size_t s = row_start_[i], e = row_start_[i + 1];
        return VectorView::sparse(
            std::span<const uint32_t>(sp_indices_.data() + s, e - s),
            std::span<const double>(sp_values_.data() + s, e - s), dim_);
    }
    return VectorView::dense(std::span<const double>(dense_.data() + i * dim_, dim_));
}

std::vector<double> FeatureMatrix::column(size_t col) const {
    std::vector<double> out(row_count_, 0.0);
    if (sparse_) {
        for (size_t i = 0; i < row_count_; ++i) {
            for (size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
                if (sp_indices_[k] == col) {
                    out[i] = sp_values_[k];
                    break;
                }
                if (sp_indices_[k] > col) break;
            }
        }
    } else {
        for (size_t i = 0; i < row_count_; ++i) out[i] = dense_[i * dim_ + col];
    }
    return out;
}

void FeatureMatrix::check_finite() const {
    const std::vector<double>& vals = sparse_ ? sp_values_ : dense_;
    for (double v : vals)
        if (!std::isfinite(v))
            throw DataError("FeatureMatrix: non-finite feature value");
}

} // namespace socmap
