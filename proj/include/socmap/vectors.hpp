#ifndef SOCMAP_VECTORS_HPP
#define SOCMAP_VECTORS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "socmap/error.hpp"

namespace socmap {

// Sparse feature vector: parallel (index, value) arrays, indices strictly
// increasing, no explicit zeros.
struct SparseVector {
    std::vector<uint32_t> indices;
    std::vector<double> values;
    uint32_t dim = 0;

    size_t nnz() const { return indices.size(); }
};

struct DenseVector {
    std::vector<double> values;

    size_t size() const { return values.size(); }
};

// Non-owning view over either representation. Dense rows leave `indices`
// empty and put all `dim` components in `values`.
class VectorView {
public:
    static VectorView sparse(std::span<const uint32_t> indices,
                             std::span<const double> values, size_t dim) {
        VectorView v;
        v.indices_ = indices;
        v.values_ = values;
        v.dim_ = dim;
        v.sparse_ = true;
        return v;
    }

    static VectorView dense(std::span<const double> values) {
        VectorView v;
        v.values_ = values;
        v.dim_ = values.size();
        v.sparse_ = false;
        return v;
    }

    static VectorView of(const SparseVector& s) {
        return sparse(s.indices, s.values, s.dim);
    }

    static VectorView of(const DenseVector& d) { return dense(d.values); }

    bool is_sparse() const { return sparse_; }
    size_t dim() const { return dim_; }
    std::span<const uint32_t> indices() const { return indices_; }
    std::span<const double> values() const { return values_; }

    double dot(std::span<const double> w) const;
    double squared_norm() const;
    // acc += scale * this
    void add_scaled_to(std::span<double> acc, double scale) const;
    double value_at(size_t col) const;

private:
    std::span<const uint32_t> indices_;
    std::span<const double> values_;
    size_t dim_ = 0;
    bool sparse_ = false;
};

double squared_distance(const VectorView& a, const VectorView& b);

// Homogeneous collection of feature rows, all sparse or all dense.
class FeatureMatrix {
public:
    FeatureMatrix() = default;

    static FeatureMatrix from_sparse(std::vector<SparseVector> rows, size_t dim);
    static FeatureMatrix from_dense(std::vector<DenseVector> rows, size_t dim);
    // Row-subset copy (rows may repeat, order preserved).
    static FeatureMatrix gather(const FeatureMatrix& src, std::span<const size_t> rows);

    size_t rows() const { return row_count_; }
    size_t dim() const { return dim_; }
    bool is_sparse() const { return sparse_; }

    VectorView row(size_t i) const;
    double value(size_t row, size_t col) const { return this->row(row).value_at(col); }

    // Column-major densification (sparse zeros materialize as 0.0).
    std::vector<double> column(size_t col) const;

    // Throws DataError if any stored value is NaN or infinite.
    void check_finite() const;

private:
    bool sparse_ = false;
    size_t row_count_ = 0;
    size_t dim_ = 0;
    // sparse storage (CSR)
    std::vector<size_t> row_start_;
    std::vector<uint32_t> sp_indices_;
    std::vector<double> sp_values_;
    // dense storage (row-major)
    std::vector<double> dense_;
};

} // namespace socmap

#endif
