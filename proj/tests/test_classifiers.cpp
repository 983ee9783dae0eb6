#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "socmap/classifier_io.hpp"
#include "socmap/classifiers.hpp"
#include "socmap/rng.hpp"
#include "test_util.hpp"

using namespace socmap;

namespace {

struct Blobs {
    FeatureMatrix X;
    std::vector<uint32_t> y;
};

// Well-separated Gaussian-ish clusters, one per class.
Blobs make_blobs(std::mt19937_64& rng, uint32_t classes, size_t per_class,
                 size_t dim, double spread) {
    std::vector<DenseVector> rows;
    std::vector<uint32_t> y;
    for (uint32_t c = 0; c < classes; ++c) {
        for (size_t i = 0; i < per_class; ++i) {
            DenseVector v;
            v.values.resize(dim);
            for (size_t j = 0; j < dim; ++j) {
                double center = (j % classes == c) ? 4.0 : 0.0;
                v.values[j] = center + spread * (uniform01(rng) - 0.5);
            }
            rows.push_back(std::move(v));
            y.push_back(c);
        }
    }
    return {FeatureMatrix::from_dense(std::move(rows), dim), std::move(y)};
}

uint32_t knn_oracle(const FeatureMatrix& train, const std::vector<uint32_t>& y,
                    uint32_t class_count, uint32_t k, const VectorView& q) {
    std::vector<std::pair<double, size_t>> order;
    for (size_t i = 0; i < train.rows(); ++i)
        order.emplace_back(squared_distance(q, train.row(i)), i);
    std::sort(order.begin(), order.end());
    std::vector<uint32_t> votes(class_count, 0);
    for (uint32_t i = 0; i < k && i < order.size(); ++i) votes[y[order[i].second]]++;
    uint32_t best = 0;
    for (uint32_t c = 1; c < class_count; ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

TrainedClassifier roundtrip(const TrainedClassifier& m) {
    BinaryWriter w;
    write_classifier(w, m);
    BinaryReader r(w.bytes());
    TrainedClassifier back = read_classifier(r);
    CHECK(r.done());
    return back;
}

} // namespace

TEST_CASE("algorithm registry round trips") {
    const std::vector<Algorithm>& all = all_algorithms();
    REQUIRE(all.size() == 7);
    CHECK(all.front() == Algorithm::knn);
    CHECK(all.back() == Algorithm::forest);
    for (Algorithm a : all) CHECK(parse_algorithm(algorithm_name(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("perceptron"), UsageError);
}

TEST_CASE("fit_classifier rejects an empty training set") {
    FeatureMatrix empty;
    std::vector<uint32_t> y;
    CHECK_THROWS_AS(fit_classifier(default_spec(Algorithm::knn), empty, y), DataError);
}

TEST_CASE("knn votes among the nearest and breaks ties low") {
    FeatureMatrix X = testutil::dense_matrix({{0.0}, {2.0}, {10.0}});
    std::vector<uint32_t> y = {1, 0, 1};
    ClassifierSpec spec = default_spec(Algorithm::knn);
    spec.knn.k = 2;
    TrainedClassifier m = fit_classifier(spec, X, y);

    // Query at 1.0: rows 0 and 1 are both at distance 1, one vote each for
    // classes 1 and 0 -> the lower class wins the tie.
    std::vector<double> q = {1.0};
    CHECK(predict(m, VectorView::dense(q)) == 0);

    // Query near 10 among two class-1 points.
    spec.knn.k = 3;
    TrainedClassifier m3 = fit_classifier(spec, X, y);
    std::vector<double> q2 = {9.0};
    CHECK(predict(m3, VectorView::dense(q2)) == 1);
}

TEST_CASE("knn equals the exhaustive-sort oracle") {
    std::mt19937_64 rng(17);
    for (bool sparse : {false, true}) {
        FeatureMatrix X = sparse ? testutil::random_sparse_matrix(rng, 60, 12, 0.4)
                                 : testutil::random_dense_matrix(rng, 60, 12, -2.0, 2.0);
        std::vector<uint32_t> y(60);
        for (auto& v : y) v = uint32_t(bounded(rng, 4));
        for (uint32_t k : {1u, 3u, 7u}) {
            ClassifierSpec spec = default_spec(Algorithm::knn);
            spec.knn.k = k;
            TrainedClassifier m = fit_classifier(spec, X, y);
            FeatureMatrix probes = testutil::random_dense_matrix(rng, 40, 12, -2.0, 2.0);
            for (size_t i = 0; i < probes.rows(); ++i) {
                uint32_t want = knn_oracle(X, y, 4, k, probes.row(i));
                CHECK(predict(m, probes.row(i)) == want);
            }
        }
    }
}

TEST_CASE("gaussian nb matches the closed form") {
    std::mt19937_64 rng(23);
    Blobs b = make_blobs(rng, 3, 8, 4, 2.0);
    ClassifierSpec spec = default_spec(Algorithm::gnb);
    TrainedClassifier tm = fit_classifier(spec, b.X, b.y);
    const GnbModel& m = std::get<GnbModel>(tm);

    size_t n = b.X.rows(), d = b.X.dim();
    // Two-pass reference: means, population variances, shared epsilon from
    // the largest whole-matrix per-feature variance.
    std::vector<size_t> counts(3, 0);
    for (uint32_t c : b.y) counts[c]++;
    std::vector<double> mean(3 * d, 0.0), var(3 * d, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) mean[b.y[i] * d + j] += b.X.value(i, j);
    for (uint32_t c = 0; c < 3; ++c)
        for (size_t j = 0; j < d; ++j) mean[c * d + j] /= double(counts[c]);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) {
            double diff = b.X.value(i, j) - mean[b.y[i] * d + j];
            var[b.y[i] * d + j] += diff * diff;
        }
    for (uint32_t c = 0; c < 3; ++c)
        for (size_t j = 0; j < d; ++j) var[c * d + j] /= double(counts[c]);

    double max_gvar = 0.0;
    for (size_t j = 0; j < d; ++j) {
        double gm = 0.0, gv = 0.0;
        for (size_t i = 0; i < n; ++i) gm += b.X.value(i, j);
        gm /= double(n);
        for (size_t i = 0; i < n; ++i) {
            double diff = b.X.value(i, j) - gm;
            gv += diff * diff;
        }
        max_gvar = std::max(max_gvar, gv / double(n));
    }
    double epsilon = spec.gnb.var_smoothing * max_gvar;

    for (uint32_t c = 0; c < 3; ++c) {
        CHECK(m.log_priors[c] ==
              doctest::Approx(std::log(double(counts[c]) / double(n))).epsilon(1e-12));
        for (size_t j = 0; j < d; ++j) {
            CHECK(m.means[c * d + j] == doctest::Approx(mean[c * d + j]).epsilon(1e-9));
            CHECK(m.variances[c * d + j] ==
                  doctest::Approx(var[c * d + j] + epsilon).epsilon(1e-9));
        }
    }

    // Predictions maximize the reference log joint density.
    FeatureMatrix probes = testutil::random_dense_matrix(rng, 50, d, -1.0, 5.0);
    for (size_t i = 0; i < probes.rows(); ++i) {
        std::vector<double> score(3);
        for (uint32_t c = 0; c < 3; ++c) {
            double s = m.log_priors[c];
            for (size_t j = 0; j < d; ++j) {
                double diff = probes.value(i, j) - m.means[c * d + j];
                double v = m.variances[c * d + j];
                s += -0.5 * std::log(2.0 * 3.14159265358979323846 * v) -
                     diff * diff / (2.0 * v);
            }
            score[c] = s;
        }
        uint32_t got = predict(tm, probes.row(i));
        CHECK(score[got] >= *std::max_element(score.begin(), score.end()) - 1e-9);
    }
}

TEST_CASE("gaussian nb never predicts a class absent from training") {
    FeatureMatrix X = testutil::dense_matrix({{0.0}, {0.1}, {5.0}, {5.1}});
    std::vector<uint32_t> y = {0, 0, 2, 2};  // class 1 never seen
    TrainedClassifier tm = fit_classifier(default_spec(Algorithm::gnb), X, y);
    const GnbModel& m = std::get<GnbModel>(tm);
    CHECK(std::isinf(m.log_priors[1]));
    CHECK(m.log_priors[1] < 0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> q = {uniform01(rng) * 10.0 - 2.0};
        CHECK(predict(tm, VectorView::dense(q)) != 1);
    }
}

TEST_CASE("logistic regression gradient matches finite differences") {
    std::mt19937_64 rng(31);
    FeatureMatrix X = testutil::random_dense_matrix(rng, 15, 4, -1.5, 1.5);
    std::vector<uint32_t> y(15);
    for (auto& v : y) v = uint32_t(bounded(rng, 3));
    size_t p = 3 * 4 + 3;
    std::vector<double> params(p);
    for (auto& v : params) v = uniform01(rng) - 0.5;

    std::vector<double> grad = logreg_gradient(X, y, 3, 0.7, params);
    REQUIRE(grad.size() == p);
    const double h = 1e-6;
    for (size_t i = 0; i < p; ++i) {
        std::vector<double> lo = params, hi = params;
        lo[i] -= h;
        hi[i] += h;
        double fd = (logreg_objective(X, y, 3, 0.7, hi) -
                     logreg_objective(X, y, 3, 0.7, lo)) /
                    (2.0 * h);
        CHECK(std::abs(fd - grad[i]) <= 1e-8 + 1e-5 * std::abs(grad[i]));
    }
}

TEST_CASE("logistic regression bias stays unregularized") {
    std::mt19937_64 rng(37);
    FeatureMatrix X = testutil::random_dense_matrix(rng, 10, 3, -1.0, 1.0);
    std::vector<uint32_t> y = {0, 1, 1, 0, 1, 0, 0, 1, 1, 0};
    std::vector<double> params(2 * 3 + 2, 0.25);
    // Raising l2_strength changes W gradient entries but not the bias ones.
    std::vector<double> g0 = logreg_gradient(X, y, 2, 0.0, params);
    std::vector<double> g1 = logreg_gradient(X, y, 2, 10.0, params);
    for (size_t i = 0; i < 6; ++i) CHECK(g0[i] != g1[i]);
    CHECK(g0[6] == g1[6]);
    CHECK(g0[7] == g1[7]);

    // And the objective difference equals exactly the ridge term.
    double f0 = logreg_objective(X, y, 2, 0.0, params);
    double f1 = logreg_objective(X, y, 2, 10.0, params);
    double wsq = 0.0;
    for (size_t i = 0; i < 6; ++i) wsq += params[i] * params[i];
    CHECK(f1 - f0 == doctest::Approx(10.0 / (2.0 * 10) * wsq).epsilon(1e-12));
}

TEST_CASE("logistic regression separates clean clusters") {
    std::mt19937_64 rng(41);
    Blobs b = make_blobs(rng, 3, 12, 5, 1.0);
    ClassifierSpec spec = default_spec(Algorithm::logreg);
    TrainedClassifier tm = fit_classifier(spec, b.X, b.y);
    const LogRegModel& m = std::get<LogRegModel>(tm);
    CHECK(m.iterations > 0);
    CHECK(m.iterations <= spec.logreg.max_iter);

    std::vector<uint32_t> pred = predict_all(tm, b.X);
    size_t hits = 0;
    for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == b.y[i];
    CHECK(hits == b.y.size());

    // Training moved the objective below the all-zeros starting point.
    std::vector<double> zeros(3 * 5 + 3, 0.0);
    std::vector<double> fitted(m.weights);
    fitted.insert(fitted.end(), m.bias.begin(), m.bias.end());
    CHECK(logreg_objective(b.X, b.y, 3, spec.logreg.l2_strength, fitted) <
          logreg_objective(b.X, b.y, 3, spec.logreg.l2_strength, zeros));
}

TEST_CASE("softmax is a probability simplex") {
    std::vector<double> s = {1.0, 2.0, -1.0, 2.0};
    std::vector<double> p = softmax(s);
    double sum = 0.0;
    for (double v : p) {
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == p[3]);
    CHECK(p[1] > p[0]);
    // Huge scores must not overflow thanks to max subtraction.
    std::vector<double> big = {1000.0, 999.0};
    std::vector<double> pb = softmax(big);
    CHECK(std::isfinite(pb[0]));
    CHECK(pb[0] > pb[1]);
}

TEST_CASE("linear svm separates clean clusters deterministically") {
    std::mt19937_64 rng(43);
    Blobs b = make_blobs(rng, 4, 15, 6, 1.0);
    ClassifierSpec spec = default_spec(Algorithm::linear_svm);
    TrainedClassifier tm = fit_classifier(spec, b.X, b.y);
    const LinearSvmModel& m = std::get<LinearSvmModel>(tm);
    CHECK(m.class_count == 4);
    CHECK(m.dim == 6);
    REQUIRE(m.weights.size() == 4 * 6);

    std::vector<uint32_t> pred = predict_all(tm, b.X);
    size_t hits = 0;
    for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == b.y[i];
    CHECK(hits == b.y.size());

    // The optimization has no random component: refits are bit-identical.
    TrainedClassifier refit = fit_classifier(spec, b.X, b.y);
    const LinearSvmModel& m2 = std::get<LinearSvmModel>(refit);
    CHECK(m.weights == m2.weights);
    CHECK(m.bias == m2.bias);
}

TEST_CASE("every classifier serializes and round trips its predictions") {
    std::mt19937_64 rng(47);
    Blobs b = make_blobs(rng, 3, 10, 5, 2.5);
    FeatureMatrix probes = testutil::random_dense_matrix(rng, 25, 5, -1.0, 5.0);

    for (Algorithm a : all_algorithms()) {
        CAPTURE(algorithm_name(a));
        ClassifierSpec spec = default_spec(a, 9);
        if (a == Algorithm::forest) spec.forest.n_estimators = 5;
        TrainedClassifier m = fit_classifier(spec, b.X, b.y);
        CHECK(algorithm_of(m) == a);
        CHECK(class_count_of(m) == 3);
        CHECK(dim_of(m) == 5);

        TrainedClassifier back = roundtrip(m);
        CHECK(algorithm_of(back) == a);
        CHECK(class_count_of(back) == 3);
        CHECK(dim_of(back) == 5);
        CHECK(predict_all(back, b.X) == predict_all(m, b.X));
        CHECK(predict_all(back, probes) == predict_all(m, probes));
    }
}

TEST_CASE("sparse training rows round trip through knn serialization") {
    std::mt19937_64 rng(53);
    FeatureMatrix X = testutil::random_sparse_matrix(rng, 20, 15, 0.3);
    std::vector<uint32_t> y(20);
    for (auto& v : y) v = uint32_t(bounded(rng, 3));
    TrainedClassifier m = fit_classifier(default_spec(Algorithm::knn), X, y);
    TrainedClassifier back = roundtrip(m);
    const KnnModel& km = std::get<KnnModel>(back);
    CHECK(km.train.is_sparse());
    REQUIRE(km.train.rows() == 20);
    for (size_t i = 0; i < 20; ++i)
        for (size_t c = 0; c < 15; ++c) CHECK(km.train.value(i, c) == X.value(i, c));
    FeatureMatrix probes = testutil::random_sparse_matrix(rng, 10, 15, 0.3);
    CHECK(predict_all(back, probes) == predict_all(m, probes));
}

TEST_CASE("classifier payloads reject corruption") {
    std::mt19937_64 rng(59);
    Blobs b = make_blobs(rng, 2, 6, 3, 1.0);
    TrainedClassifier m = fit_classifier(default_spec(Algorithm::gnb), b.X, b.y);
    BinaryWriter w;
    write_classifier(w, m);
    std::vector<uint8_t> bytes = w.bytes();

    // Truncation anywhere inside the payload must throw, not crash.
    for (size_t cut : {size_t(0), size_t(1), bytes.size() / 2, bytes.size() - 1}) {
        BinaryReader r(bytes.data(), cut);
        CHECK_THROWS_AS(read_classifier(r), IoError);
    }

    std::vector<uint8_t> wrong_tag = bytes;
    wrong_tag[0] = 0xEE;
    BinaryReader r(wrong_tag);
    CHECK_THROWS_WITH_AS(read_classifier(r), doctest::Contains("tag"), IoError);
}
