#include <type_traits>
#include <vector>

#include "socmap/classifier_io.hpp"

namespace socmap {

namespace {

constexpr uint8_t kSparseTag = 1;
constexpr uint8_t kDenseTag = 0;

void write_knn(BinaryWriter& w, const KnnModel& m) {
    w.u32(m.k);
    w.u32(m.class_count);
    write_feature_matrix(w, m.train);
    w.u32_array(m.labels);
}

KnnModel read_knn(BinaryReader& r) {
    KnnModel m;
    m.k = r.u32();
    m.class_count = r.u32();
    m.train = read_feature_matrix(r);
    m.labels = r.u32_array();
    if (m.labels.size() != m.train.rows())
        throw IoError("nearest-neighbor payload: label count mismatch");
    return m;
}

void write_gnb(BinaryWriter& w, const GnbModel& m) {
    w.u32(m.class_count);
    w.u32(m.dim);
    w.f64_array(m.log_priors);
    w.f64_array(m.means);
    w.f64_array(m.variances);
}

GnbModel read_gnb(BinaryReader& r) {
    GnbModel m;
    m.class_count = r.u32();
    m.dim = r.u32();
    m.log_priors = r.f64_array();
    m.means = r.f64_array();
    m.variances = r.f64_array();
    size_t cells = size_t(m.class_count) * m.dim;
    if (m.log_priors.size() != m.class_count || m.means.size() != cells ||
        m.variances.size() != cells)
        throw IoError("gaussian payload: size mismatch");
    return m;
}

void write_linear(BinaryWriter& w, uint32_t class_count, uint32_t dim,
                  const std::vector<double>& weights, const std::vector<double>& bias) {
    w.u32(class_count);
    w.u32(dim);
    w.f64_array(weights);
    w.f64_array(bias);
}

void read_linear(BinaryReader& r, uint32_t& class_count, uint32_t& dim,
                 std::vector<double>& weights, std::vector<double>& bias) {
    class_count = r.u32();
    dim = r.u32();
    weights = r.f64_array();
    bias = r.f64_array();
    if (weights.size() != size_t(class_count) * dim || bias.size() != class_count)
        throw IoError("linear payload: size mismatch");
}

void write_svc(BinaryWriter& w, const SvcRbfModel& m) {
    w.u32(m.class_count);
    w.u32(m.dim);
    w.f64(m.gamma);
    w.u64(m.pairs.size());
    for (const auto& p : m.pairs) {
        w.u32(p.class_a);
        w.u32(p.class_b);
        w.f64(p.bias);
        w.u8(p.converged ? 1 : 0);
        w.f64_array(p.coef);
        write_feature_matrix(w, p.support);
    }
}

SvcRbfModel read_svc(BinaryReader& r) {
    SvcRbfModel m;
    m.class_count = r.u32();
    m.dim = r.u32();
    m.gamma = r.f64();
    uint64_t pairs = r.u64();
    m.pairs.reserve(pairs);
    for (uint64_t i = 0; i < pairs; ++i) {
        SvcRbfModel::Binary p;
        p.class_a = r.u32();
        p.class_b = r.u32();
        p.bias = r.f64();
        p.converged = r.u8() != 0;
        p.coef = r.f64_array();
        p.support = read_feature_matrix(r);
        if (p.coef.size() != p.support.rows())
            throw IoError("kernel payload: support size mismatch");
        m.pairs.push_back(std::move(p));
    }
    return m;
}

void write_tree(BinaryWriter& w, const TreeModel& m) {
    w.u32(m.class_count);
    w.u32(m.dim);
    w.u64(m.nodes.size());
    for (const TreeNode& n : m.nodes) {
        w.u32(uint32_t(n.feature));
        w.f64(n.threshold);
        w.u32(n.left);
        w.u32(n.right);
        w.u32_array(n.counts);
    }
}

TreeModel read_tree(BinaryReader& r) {
    TreeModel m;
    m.class_count = r.u32();
    m.dim = r.u32();
    uint64_t count = r.u64();
    m.nodes.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        TreeNode n;
        n.feature = int32_t(r.u32());
        n.threshold = r.f64();
        n.left = r.u32();
        n.right = r.u32();
        n.counts = r.u32_array();
        if (n.feature >= 0 && (n.left >= count || n.right >= count))
            throw IoError("tree payload: child index out of range");
        m.nodes.push_back(std::move(n));
    }
    if (m.nodes.empty()) throw IoError("tree payload: empty node table");
    return m;
}

} // namespace

void write_feature_matrix(BinaryWriter& w, const FeatureMatrix& X) {
    w.u8(X.is_sparse() ? kSparseTag : kDenseTag);
    w.u64(X.rows());
    w.u64(X.dim());
    for (size_t i = 0; i < X.rows(); ++i) {
        VectorView row = X.row(i);
        if (X.is_sparse()) {
            std::vector<uint32_t> idx(row.indices().begin(), row.indices().end());
            std::vector<double> val(row.values().begin(), row.values().end());
            w.u32_array(idx);
            w.f64_array(val);
        } else {
            std::vector<double> val(row.values().begin(), row.values().end());
            w.f64_array(val);
        }
    }
}

FeatureMatrix read_feature_matrix(BinaryReader& r) {
    uint8_t tag = r.u8();
    uint64_t rows = r.u64();
    uint64_t dim = r.u64();
    if (tag == kSparseTag) {
        std::vector<SparseVector> sv(rows);
        for (uint64_t i = 0; i < rows; ++i) {
            sv[i].indices = r.u32_array();
            sv[i].values = r.f64_array();
            sv[i].dim = uint32_t(dim);
            if (sv[i].indices.size() != sv[i].values.size())
                throw IoError("feature payload: ragged sparse row");
        }
        return FeatureMatrix::from_sparse(std::move(sv), dim);
    }
    std::vector<DenseVector> dv(rows);
    for (uint64_t i = 0; i < rows; ++i) {
        dv[i].values = r.f64_array();
        if (dv[i].values.size() != dim)
            throw IoError("feature payload: dense row length mismatch");
    }
    return FeatureMatrix::from_dense(std::move(dv), dim);
}

void write_classifier(BinaryWriter& w, const TrainedClassifier& m) {
    w.u8(uint8_t(m.index()));
    std::visit(
        [&](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, KnnModel>) {
                write_knn(w, model);
            } else if constexpr (std::is_same_v<T, GnbModel>) {
                write_gnb(w, model);
            } else if constexpr (std::is_same_v<T, LogRegModel>) {
                write_linear(w, model.class_count, model.dim, model.weights, model.bias);
                w.u32(model.iterations);
            } else if constexpr (std::is_same_v<T, LinearSvmModel>) {
                write_linear(w, model.class_count, model.dim, model.weights, model.bias);
            } else if constexpr (std::is_same_v<T, SvcRbfModel>) {
                write_svc(w, model);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                write_tree(w, model);
            } else {
                static_assert(std::is_same_v<T, ForestModel>);
                w.u32(model.class_count);
                w.u32(model.dim);
                w.u64(model.trees.size());
                for (const TreeModel& t : model.trees) write_tree(w, t);
            }
        },
        m);
}

TrainedClassifier read_classifier(BinaryReader& r) {
    uint8_t tag = r.u8();
    switch (tag) {
    case 0:
        return read_knn(r);
    case 1:
        return read_gnb(r);
    case 2: {
        LogRegModel m;
        read_linear(r, m.class_count, m.dim, m.weights, m.bias);
        m.iterations = r.u32();
        return m;
    }
    case 3: {
        LinearSvmModel m;
        read_linear(r, m.class_count, m.dim, m.weights, m.bias);
        return m;
    }
    case 4:
        return read_svc(r);
    case 5:
        return read_tree(r);
    case 6: {
        ForestModel m;
        m.class_count = r.u32();
        m.dim = r.u32();
        uint64_t trees = r.u64();
        m.trees.reserve(trees);
        for (uint64_t i = 0; i < trees; ++i) m.trees.push_back(read_tree(r));
        return m;
    }
    default:
        throw IoError("unknown classifier tag in payload");
    }
}

} // namespace socmap
