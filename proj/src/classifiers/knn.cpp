#include <algorithm>

#include "classifiers_impl.hpp"
#include "socmap/error.hpp"

namespace socmap::detail {

KnnModel fit_knn(const KnnSpec& spec, const FeatureMatrix& X,
                 std::span<const uint32_t> y, uint32_t class_count) {
    if (spec.k == 0)
        throw UsageError("knn: k must be at least 1");
    KnnModel m;
    m.k = spec.k;
    m.train = X;
    m.labels.assign(y.begin(), y.end());
    m.class_count = class_count;
    return m;
}

uint32_t predict_knn(const KnnModel& m, const VectorView& x) {
    size_t n = m.train.rows();
    std::vector<std::pair<double, size_t>> dist;
    dist.reserve(n);
    for (size_t i = 0; i < n; ++i)
        dist.emplace_back(squared_distance(x, m.train.row(i)), i);
    // Equidistant neighbors resolve to the lower training index.
    size_t k = std::min<size_t>(m.k, n);
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    std::vector<uint32_t> votes(m.class_count, 0);
    for (size_t i = 0; i < k; ++i) ++votes[m.labels[dist[i].second]];
    uint32_t best = 0;
    for (uint32_t c = 1; c < m.class_count; ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

} // namespace socmap::detail
