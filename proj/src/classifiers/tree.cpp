#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "classifiers_impl.hpp"
#include "socmap/rng.hpp"

namespace socmap {

double gini_impurity(std::span<const uint32_t> counts) {
    uint64_t n = 0, sq = 0;
    for (uint32_t c : counts) {
        n += c;
        sq += uint64_t(c) * c;
    }
    if (n == 0) return 0.0;
    return 1.0 - double(sq) / (double(n) * double(n));
}

namespace {

struct BestCandidate {
    bool found = false;
    uint32_t feature = 0;
    double threshold = 0.0;
    double weighted = 0.0;
};

// Scans features in the given order and thresholds in ascending order,
// accepting a candidate only on a strict improvement, so ties resolve to
// the lowest feature index and then the lowest threshold. A split must
// beat the parent impurity by more than 1e-12 to count at all.
BestCandidate scan_splits(const std::vector<std::vector<double>>& cols,
                          std::span<const uint32_t> y,
                          std::span<const size_t> rows, uint32_t class_count,
                          std::span<const uint32_t> feature_subset) {
    const size_t n = rows.size();
    std::vector<uint32_t> parent(class_count, 0);
    for (size_t r : rows) ++parent[y[r]];

    BestCandidate best;
    double best_weighted = gini_impurity(parent) - 1e-12;

    std::vector<std::pair<double, uint32_t>> order(n);
    std::vector<uint32_t> left(class_count);
    for (uint32_t f : feature_subset) {
        const std::vector<double>& col = cols[f];
        for (size_t i = 0; i < n; ++i) order[i] = {col[rows[i]], y[rows[i]]};
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::fill(left.begin(), left.end(), 0u);
        uint64_t left_sq = 0, right_sq = 0;
        for (uint32_t c : parent) right_sq += uint64_t(c) * c;
        std::vector<uint32_t> right(parent.begin(), parent.end());
        for (size_t i = 0; i + 1 < n; ++i) {
            uint32_t cls = order[i].second;
            left_sq += 2 * uint64_t(left[cls]) + 1;
            ++left[cls];
            right_sq -= 2 * uint64_t(right[cls]) - 1;
            --right[cls];

            if (order[i].first == order[i + 1].first) continue;
            double thr = 0.5 * (order[i].first + order[i + 1].first);
            if (thr >= order[i + 1].first) continue; // adjacent doubles
            // Exact integer numerator over one shared denominator: splits
            // with equal true impurity get bit-identical doubles (both
            // terms are exact up to ~2e5 rows), so the strict < below
            // resolves ties purely by scan order.
            const uint64_t nl = i + 1, nr = n - i - 1;
            const uint64_t num = nl * nr * uint64_t(n) - left_sq * nr - right_sq * nl;
            const double weighted = double(num) / double(nl * nr * uint64_t(n));
            if (weighted < best_weighted) {
                best_weighted = weighted;
                best.found = true;
                best.feature = f;
                best.threshold = thr;
                best.weighted = weighted;
            }
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& cols,
                std::span<const uint32_t> y, const TreeSpec& spec,
                uint32_t class_count, uint32_t features_per_split,
                std::mt19937_64* rng)
        : cols_(cols), y_(y), spec_(spec), class_count_(class_count),
          features_per_split_(features_per_split), rng_(rng) {
        all_features_.resize(cols.size());
        std::iota(all_features_.begin(), all_features_.end(), 0u);
    }

    TreeModel build(std::vector<size_t> rows) {
        TreeModel m;
        m.class_count = class_count_;
        m.dim = uint32_t(cols_.size());
        grow(m.nodes, std::move(rows), 0);
        return m;
    }

private:
    std::span<const uint32_t> node_features() {
        if (rng_ == nullptr || features_per_split_ >= cols_.size())
            return all_features_;
        // Draw a fresh feature sample for every node, reported in
        // ascending order.
        sampled_.assign(all_features_.begin(), all_features_.end());
        for (uint32_t i = 0; i < features_per_split_; ++i) {
            size_t j = i + bounded(*rng_, sampled_.size() - i);
            std::swap(sampled_[i], sampled_[j]);
        }
        sampled_.resize(features_per_split_);
        std::sort(sampled_.begin(), sampled_.end());
        return sampled_;
    }

    uint32_t grow(std::vector<TreeNode>& nodes, std::vector<size_t> rows,
                  uint32_t depth) {
        std::vector<uint32_t> counts(class_count_, 0);
        for (size_t r : rows) ++counts[y_[r]];
        uint32_t present = 0;
        for (uint32_t c : counts) present += c > 0 ? 1 : 0;

        uint32_t id = uint32_t(nodes.size());
        nodes.emplace_back();

        bool depth_capped = spec_.max_depth != 0 && depth >= spec_.max_depth;
        if (present <= 1 || rows.size() < spec_.min_samples_split || depth_capped) {
            nodes[id].counts = std::move(counts);
            return id;
        }
        BestCandidate split = scan_splits(cols_, y_, rows, class_count_, node_features());
        if (!split.found) {
            nodes[id].counts = std::move(counts);
            return id;
        }

        std::vector<size_t> lrows, rrows;
        for (size_t r : rows)
            (cols_[split.feature][r] <= split.threshold ? lrows : rrows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        nodes[id].feature = int32_t(split.feature);
        nodes[id].threshold = split.threshold;
        uint32_t l = grow(nodes, std::move(lrows), depth + 1);
        uint32_t r = grow(nodes, std::move(rrows), depth + 1);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }

    const std::vector<std::vector<double>>& cols_;
    std::span<const uint32_t> y_;
    const TreeSpec& spec_;
    uint32_t class_count_;
    uint32_t features_per_split_;
    std::mt19937_64* rng_;
    std::vector<uint32_t> all_features_;
    std::vector<uint32_t> sampled_;
};

uint32_t majority_class(std::span<const uint32_t> counts) {
    uint32_t best = 0;
    for (uint32_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    return best;
}

} // namespace

std::optional<Split> best_split(const FeatureMatrix& X, std::span<const uint32_t> y,
                                std::span<const uint32_t> feature_subset) {
    uint32_t class_count = 0;
    for (uint32_t v : y) class_count = std::max(class_count, v + 1);
    std::vector<std::vector<double>> cols = detail::densify_columns(X);
    std::vector<size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), size_t{0});
    BestCandidate c = scan_splits(cols, y, rows, class_count, feature_subset);
    if (!c.found) return std::nullopt;
    return Split{c.feature, c.threshold};
}

namespace detail {

TreeModel fit_tree(const TreeSpec& spec, const FeatureMatrix& X,
                   std::span<const uint32_t> y, uint32_t class_count) {
    std::vector<std::vector<double>> cols = densify_columns(X);
    TreeBuilder builder(cols, y, spec, class_count, uint32_t(X.dim()), nullptr);
    std::vector<size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), size_t{0});
    return builder.build(std::move(rows));
}

uint32_t predict_tree(const TreeModel& m, const VectorView& x) {
    uint32_t node = 0;
    while (m.nodes[node].feature >= 0) {
        const TreeNode& nd = m.nodes[node];
        node = x.value_at(size_t(nd.feature)) <= nd.threshold ? nd.left : nd.right;
    }
    return majority_class(m.nodes[node].counts);
}

ForestModel fit_forest(const ForestSpec& spec, uint64_t seed, const FeatureMatrix& X,
                       std::span<const uint32_t> y, uint32_t class_count) {
    const size_t n = X.rows();
    uint32_t fps = spec.features_per_split != 0
                       ? spec.features_per_split
                       : uint32_t(std::ceil(std::sqrt(double(X.dim()))));
    fps = std::min(fps, uint32_t(X.dim()));

    std::vector<std::vector<double>> cols = densify_columns(X);

    ForestModel m;
    m.class_count = class_count;
    m.dim = uint32_t(X.dim());
    m.trees.reserve(spec.n_estimators);
    for (uint32_t t = 0; t < spec.n_estimators; ++t) {
        std::mt19937_64 rng(derive_seed(seed, t));
        std::vector<size_t> rows(n);
        if (spec.bootstrap)
            for (size_t i = 0; i < n; ++i) rows[i] = bounded(rng, n);
        else
            std::iota(rows.begin(), rows.end(), size_t{0});
        TreeBuilder builder(cols, y, spec.tree, class_count, fps, &rng);
        m.trees.push_back(builder.build(std::move(rows)));
    }
    return m;
}

uint32_t predict_forest(const ForestModel& m, const VectorView& x) {
    std::vector<uint32_t> votes(m.class_count, 0);
    for (const TreeModel& t : m.trees) ++votes[predict_tree(t, x)];
    return majority_class(votes);
}

} // namespace detail
} // namespace socmap
