#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "socmap/binio.hpp"
#include "socmap/vectors.hpp"
#include "test_util.hpp"

using namespace socmap;

namespace {

double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double ref_sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace

TEST_CASE("dense vector view arithmetic") {
    std::vector<double> v = {1.0, -2.0, 0.0, 3.5};
    VectorView x = VectorView::dense(v);
    CHECK(x.dim() == 4);
    CHECK(!x.is_sparse());
    CHECK(x.value_at(0) == 1.0);
    CHECK(x.value_at(2) == 0.0);
    CHECK(x.squared_norm() == doctest::Approx(1 + 4 + 12.25).epsilon(1e-15));

    std::vector<double> w = {2.0, 1.0, 5.0, -1.0};
    CHECK(x.dot(w) == doctest::Approx(2.0 - 2.0 + 0.0 - 3.5).epsilon(1e-15));

    std::vector<double> acc = {10.0, 10.0, 10.0, 10.0};
    x.add_scaled_to(acc, 2.0);
    CHECK(acc[0] == 12.0);
    CHECK(acc[1] == 6.0);
    CHECK(acc[2] == 10.0);
    CHECK(acc[3] == 17.0);
}

TEST_CASE("sparse vector view matches densified reference") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        SparseVector s = testutil::random_sparse_vector(rng, 40, 0.3);
        std::vector<double> d = testutil::densify(s);
        VectorView x = VectorView::of(s);
        CHECK(x.is_sparse());
        CHECK(x.dim() == 40);

        std::vector<double> w(40);
        for (size_t i = 0; i < w.size(); ++i) w[i] = uniform01(rng) - 0.5;
        CHECK(x.dot(w) == doctest::Approx(ref_dot(d, w)).epsilon(1e-12));
        CHECK(x.squared_norm() == doctest::Approx(ref_dot(d, d)).epsilon(1e-12));
        for (uint32_t c = 0; c < 40; ++c) CHECK(x.value_at(c) == d[c]);

        std::vector<double> acc(40, 1.0), ref(40, 1.0);
        x.add_scaled_to(acc, -1.5);
        for (size_t i = 0; i < 40; ++i) ref[i] += -1.5 * d[i];
        for (size_t i = 0; i < 40; ++i) CHECK(acc[i] == doctest::Approx(ref[i]).epsilon(1e-15));
    }
}

TEST_CASE("squared distance agrees across storage mixes") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        SparseVector sa = testutil::random_sparse_vector(rng, 25, 0.4);
        SparseVector sb = testutil::random_sparse_vector(rng, 25, 0.4);
        std::vector<double> da = testutil::densify(sa);
        std::vector<double> db = testutil::densify(sb);
        double want = ref_sqdist(da, db);

        VectorView va = VectorView::of(sa);
        VectorView vb = VectorView::of(sb);
        VectorView wa = VectorView::dense(da);
        VectorView wb = VectorView::dense(db);

        CHECK(squared_distance(va, vb) == doctest::Approx(want).epsilon(1e-12));
        CHECK(squared_distance(vb, va) == doctest::Approx(want).epsilon(1e-12));
        CHECK(squared_distance(va, wb) == doctest::Approx(want).epsilon(1e-12));
        CHECK(squared_distance(wa, vb) == doctest::Approx(want).epsilon(1e-12));
        CHECK(squared_distance(wa, wb) == doctest::Approx(want).epsilon(1e-12));
        CHECK(squared_distance(va, va) == 0.0);
    }
}

TEST_CASE("feature matrix round trips rows and columns") {
    std::mt19937_64 rng(3);
    FeatureMatrix sp = testutil::random_sparse_matrix(rng, 12, 9, 0.35);
    CHECK(sp.rows() == 12);
    CHECK(sp.dim() == 9);
    CHECK(sp.is_sparse());
    for (size_t c = 0; c < 9; ++c) {
        std::vector<double> col = sp.column(c);
        REQUIRE(col.size() == 12);
        for (size_t r = 0; r < 12; ++r) CHECK(col[r] == sp.value(r, c));
    }

    FeatureMatrix dn = testutil::random_dense_matrix(rng, 6, 4, -1.0, 1.0);
    CHECK(!dn.is_sparse());
    for (size_t c = 0; c < 4; ++c) {
        std::vector<double> col = dn.column(c);
        for (size_t r = 0; r < 6; ++r) CHECK(col[r] == dn.value(r, c));
    }
}

TEST_CASE("gather copies rows in order and allows repeats") {
    std::mt19937_64 rng(5);
    FeatureMatrix sp = testutil::random_sparse_matrix(rng, 8, 10, 0.4);
    std::vector<size_t> pick = {3, 3, 0, 7, 3};
    FeatureMatrix sub = FeatureMatrix::gather(sp, pick);
    REQUIRE(sub.rows() == pick.size());
    CHECK(sub.dim() == sp.dim());
    for (size_t i = 0; i < pick.size(); ++i)
        for (size_t c = 0; c < sp.dim(); ++c)
            CHECK(sub.value(i, c) == sp.value(pick[i], c));

    FeatureMatrix dn = testutil::random_dense_matrix(rng, 5, 3, 0.0, 1.0);
    std::vector<size_t> dpick = {4, 1, 1, 0, 4, 2};
    FeatureMatrix dsub = FeatureMatrix::gather(dn, dpick);
    REQUIRE(dsub.rows() == dpick.size());
    for (size_t i = 0; i < dpick.size(); ++i)
        for (size_t c = 0; c < 3; ++c)
            CHECK(dsub.value(i, c) == dn.value(dpick[i], c));
}

TEST_CASE("check_finite rejects NaN and infinity") {
    FeatureMatrix ok = testutil::dense_matrix({{1.0, 2.0}, {3.0, 4.0}});
    CHECK_NOTHROW(ok.check_finite());

    FeatureMatrix bad_nan =
        testutil::dense_matrix({{1.0, std::numeric_limits<double>::quiet_NaN()}});
    CHECK_THROWS_AS(bad_nan.check_finite(), DataError);

    std::vector<SparseVector> rows(1);
    rows[0].dim = 3;
    rows[0].indices = {1};
    rows[0].values = {std::numeric_limits<double>::infinity()};
    FeatureMatrix bad_inf = FeatureMatrix::from_sparse(std::move(rows), 3);
    CHECK_THROWS_AS(bad_inf.check_finite(), DataError);
}

TEST_CASE("crc32 matches the reference check value") {
    // The standard CRC-32 check vector.
    const char* s = "123456789";
    CHECK(crc32(s, 9) == 0xCBF43926u);
    CHECK(crc32(nullptr, 0) == 0u);
    // Incremental computation chains through the seed.
    uint32_t part = crc32(s, 4);
    CHECK(crc32(s + 4, 5, part) == 0xCBF43926u);
}

TEST_CASE("binary writer and reader round trip every field type") {
    BinaryWriter w;
    w.u8(0xAB);
    w.u32(0xDEADBEEFu);
    w.u64(0x0123456789ABCDEFull);
    w.i64(-42);
    w.f32(1.5f);
    w.f64(-2.25);
    w.str("hello \t\n world");
    w.f64_array({0.1, -0.2, 0.3});
    w.f32_array({1.0f, 2.0f});
    w.u32_array({7, 8, 9, 10});

    BinaryReader r(w.bytes());
    CHECK(r.u8() == 0xAB);
    CHECK(r.u32() == 0xDEADBEEFu);
    CHECK(r.u64() == 0x0123456789ABCDEFull);
    CHECK(r.i64() == -42);
    CHECK(r.f32() == 1.5f);
    CHECK(r.f64() == -2.25);
    CHECK(r.str() == "hello \t\n world");
    CHECK(r.f64_array() == std::vector<double>{0.1, -0.2, 0.3});
    CHECK(r.f32_array() == std::vector<float>{1.0f, 2.0f});
    CHECK(r.u32_array() == std::vector<uint32_t>{7, 8, 9, 10});
    CHECK(r.done());
}

TEST_CASE("binary reader reports truncation") {
    BinaryWriter w;
    w.u64(100);  // promises a 100-element array that is not there
    BinaryReader r(w.bytes());
    CHECK_THROWS_AS(r.f64_array(), IoError);

    BinaryWriter w2;
    w2.u32(1);
    BinaryReader r2(w2.bytes());
    r2.u32();
    CHECK_THROWS_AS(r2.u8(), IoError);
}

TEST_CASE("file byte round trip") {
    testutil::TempDir tmp("binio");
    std::vector<uint8_t> payload = {0, 1, 2, 255, 254, 0, 42};
    write_file_bytes(tmp.path("blob.bin"), payload);
    CHECK(read_file_bytes(tmp.path("blob.bin")) == payload);
    CHECK_THROWS_AS(read_file_bytes(tmp.path("missing.bin")), IoError);
}
