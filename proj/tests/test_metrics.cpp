#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "socmap/metrics.hpp"
#include "socmap/rng.hpp"

using namespace socmap;

namespace {

// Reference implementation working from an explicit confusion matrix.
struct MacroScores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

MacroScores confusion_oracle(const std::vector<uint32_t>& yt,
                             const std::vector<uint32_t>& yp, uint32_t classes) {
    std::vector<uint64_t> cm(size_t(classes) * classes, 0);
    uint64_t hits = 0;
    for (size_t i = 0; i < yt.size(); ++i) {
        cm[size_t(yt[i]) * classes + yp[i]]++;
        if (yt[i] == yp[i]) hits++;
    }
    MacroScores s;
    s.accuracy = yt.empty() ? 0.0 : double(hits) / double(yt.size());
    for (uint32_t c = 0; c < classes; ++c) {
        uint64_t tp = cm[size_t(c) * classes + c];
        uint64_t pred_c = 0, true_c = 0;
        for (uint32_t k = 0; k < classes; ++k) {
            pred_c += cm[size_t(k) * classes + c];
            true_c += cm[size_t(c) * classes + k];
        }
        double p = pred_c ? double(tp) / double(pred_c) : 0.0;
        double r = true_c ? double(tp) / double(true_c) : 0.0;
        double f = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
        s.precision += p;
        s.recall += r;
        s.f1 += f;
    }
    s.precision /= classes;
    s.recall /= classes;
    s.f1 /= classes;
    return s;
}

} // namespace

TEST_CASE("macro metrics on a worked example") {
    std::vector<uint32_t> yt = {0, 0, 1, 1, 2};
    std::vector<uint32_t> yp = {0, 1, 1, 1, 0};
    // Class 0: tp=1 fp=1 fn=1; class 1: tp=2 fp=1 fn=0; class 2: never
    // predicted and its one member missed, so all three scores are 0.
    CHECK(accuracy(yt, yp) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
    CHECK(macro_precision(yt, yp, 3) ==
          doctest::Approx((0.5 + 2.0 / 3.0 + 0.0) / 3.0).epsilon(1e-15));
    CHECK(macro_recall(yt, yp, 3) ==
          doctest::Approx((0.5 + 1.0 + 0.0) / 3.0).epsilon(1e-15));
    CHECK(macro_f1(yt, yp, 3) ==
          doctest::Approx((0.5 + 0.8 + 0.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("perfect and degenerate predictions") {
    std::vector<uint32_t> yt = {2, 0, 1, 2, 1};
    CHECK(accuracy(yt, yt) == 1.0);
    CHECK(macro_precision(yt, yt, 3) == 1.0);
    CHECK(macro_recall(yt, yt, 3) == 1.0);
    CHECK(macro_f1(yt, yt, 3) == 1.0);

    // All predictions land on class 0.
    std::vector<uint32_t> zeros(yt.size(), 0);
    CHECK(accuracy(yt, zeros) == doctest::Approx(0.2).epsilon(1e-15));
    // Precision: class 0 gets 1/5, classes 1..2 have no predictions -> 0.
    CHECK(macro_precision(yt, zeros, 3) == doctest::Approx(0.2 / 3.0).epsilon(1e-15));
    // Recall: class 0 gets 1, the others 0.
    CHECK(macro_recall(yt, zeros, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("macro averages run over the declared class range") {
    // Classes 3 and 4 never occur; with class_count=5 they still divide the
    // macro averages.
    std::vector<uint32_t> yt = {0, 1, 2};
    std::vector<uint32_t> yp = {0, 1, 2};
    CHECK(macro_precision(yt, yp, 5) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
    CHECK(macro_recall(yt, yp, 5) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
    CHECK(macro_f1(yt, yp, 5) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("metrics agree with the confusion-matrix oracle on random labelings") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 300; ++rep) {
        uint32_t classes = 2 + uint32_t(bounded(rng, 9));
        size_t n = 1 + bounded(rng, 80);
        std::vector<uint32_t> yt(n), yp(n);
        for (size_t i = 0; i < n; ++i) {
            yt[i] = uint32_t(bounded(rng, classes));
            // Skewed predictions so some classes end up never predicted.
            yp[i] = uint32_t(bounded(rng, 1 + bounded(rng, classes)));
        }
        MacroScores want = confusion_oracle(yt, yp, classes);
        CHECK(accuracy(yt, yp) == doctest::Approx(want.accuracy).epsilon(1e-12));
        CHECK(macro_precision(yt, yp, classes) ==
              doctest::Approx(want.precision).epsilon(1e-12));
        CHECK(macro_recall(yt, yp, classes) ==
              doctest::Approx(want.recall).epsilon(1e-12));
        CHECK(macro_f1(yt, yp, classes) == doctest::Approx(want.f1).epsilon(1e-12));
    }
}
