#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "socmap/doc2vec.hpp"
#include "test_util.hpp"

using namespace socmap;

namespace {

// Two topical clusters with disjoint vocabularies; every token recurs far
// beyond the count threshold.
std::vector<std::string> cluster_corpus(size_t per_cluster) {
    const std::vector<std::string> kitchen = {"knife", "saute", "oven", "recipe",
                                             "plating", "garnish"};
    const std::vector<std::string> garage = {"torque", "piston", "brake", "diagnose",
                                            "transmission", "alignment"};
    std::vector<std::string> docs;
    for (size_t i = 0; i < per_cluster; ++i) {
        std::string a, b;
        for (size_t k = 0; k < 12; ++k) {
            a += kitchen[(i + k) % kitchen.size()] + " ";
            b += garage[(i * 3 + k) % garage.size()] + " ";
        }
        docs.push_back(a);
        docs.push_back(b);
    }
    return docs;
}

EmbedConfig small_config() {
    EmbedConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 10;
    cfg.seed = 5;
    return cfg;
}

bool bit_equal(std::span<const float> a, std::span<const float> b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

} // namespace

TEST_CASE("cosine similarity basics") {
    std::vector<float> x = {1.0f, 0.0f}, y = {0.0f, 2.0f}, z = {3.0f, 0.0f};
    CHECK(cosine_similarity(x, y) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine_similarity(x, z) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<float> neg = {-1.0f, 0.0f};
    CHECK(cosine_similarity(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    std::vector<float> zero = {0.0f, 0.0f};
    CHECK(cosine_similarity(x, zero) == 0.0);
}

TEST_CASE("embedding training separates topical clusters") {
    std::vector<std::string> docs = cluster_corpus(15);
    DocEmbedder emb = DocEmbedder::fit(docs, small_config());
    CHECK(emb.doc_count() == docs.size());
    CHECK(emb.dim() == 16);
    CHECK(emb.vocab_size() == 12);

    // Per-epoch probe loss must shrink overall as training proceeds.
    const std::vector<double>& loss = emb.epoch_probe_loss();
    REQUIRE(loss.size() == 10);
    CHECK(loss.back() < loss.front());
    for (double v : loss) CHECK(std::isfinite(v));

    // Same-cluster documents sit closer than cross-cluster ones on average.
    double within = 0.0, across = 0.0;
    size_t nw = 0, na = 0;
    for (size_t i = 0; i < docs.size(); ++i) {
        for (size_t j = i + 1; j < docs.size(); ++j) {
            double c = cosine_similarity(emb.doc_vector(i), emb.doc_vector(j));
            if (i % 2 == j % 2) {
                within += c;
                ++nw;
            } else {
                across += c;
                ++na;
            }
        }
    }
    within /= double(nw);
    across /= double(na);
    CHECK(within > across);
}

TEST_CASE("embedding training is deterministic in the seed") {
    std::vector<std::string> docs = cluster_corpus(8);
    EmbedConfig cfg = small_config();
    DocEmbedder a = DocEmbedder::fit(docs, cfg);
    DocEmbedder b = DocEmbedder::fit(docs, cfg);
    for (size_t i = 0; i < docs.size(); ++i)
        CHECK(bit_equal(a.doc_vector(i), b.doc_vector(i)));
    CHECK(a.epoch_probe_loss() == b.epoch_probe_loss());
    CHECK(bit_equal(a.infer(docs[0]), b.infer(docs[0])));

    cfg.seed = 6;
    DocEmbedder c = DocEmbedder::fit(docs, cfg);
    bool identical = true;
    for (size_t i = 0; i < docs.size() && identical; ++i)
        identical = bit_equal(a.doc_vector(i), c.doc_vector(i));
    CHECK(!identical);
}

TEST_CASE("inference is repeatable and tracks the trained document") {
    std::vector<std::string> docs = cluster_corpus(12);
    DocEmbedder emb = DocEmbedder::fit(docs, small_config());

    // The generator reseeds per call: equal inputs, equal outputs.
    std::vector<float> v1 = emb.infer(docs[3]);
    std::vector<float> v2 = emb.infer(docs[3]);
    CHECK(bit_equal(v1, v2));

    // Inferring a garage text lands nearer the garage cluster than the
    // kitchen cluster (documents alternate kitchen/garage).
    double garage = 0.0, kitchen = 0.0;
    size_t ng = 0, nk = 0;
    for (size_t j = 0; j < emb.doc_count(); ++j) {
        double c = cosine_similarity(v1, emb.doc_vector(j));
        if (j % 2 == 1) {
            garage += c;
            ++ng;
        } else {
            kitchen += c;
            ++nk;
        }
    }
    CHECK(garage / double(ng) > kitchen / double(nk));

    // All-unknown text still produces a finite vector of the right size.
    std::vector<float> oov = emb.infer("qqq zzz www");
    REQUIRE(oov.size() == emb.dim());
    for (float f : oov) CHECK(std::isfinite(f));
    CHECK(bit_equal(oov, emb.infer("qqq zzz www")));
}

TEST_CASE("vocabulary respects the count threshold") {
    // "rare" appears once; the rest appear twice or more.
    std::vector<std::string> docs = {"alpha beta alpha", "beta rare alpha beta"};
    EmbedConfig cfg = small_config();
    cfg.min_token_count = 2;
    DocEmbedder emb = DocEmbedder::fit(docs, cfg);
    CHECK(emb.vocab_size() == 2);  // alpha, beta
}

TEST_CASE("degenerate corpora are rejected with distinct errors") {
    EmbedConfig cfg = small_config();
    CHECK_THROWS_WITH_AS(DocEmbedder::fit({}, cfg),
                         doctest::Contains("corpus is empty"), DataError);

    std::vector<std::string> all_rare = {"one two", "three four"};
    cfg.min_token_count = 2;
    CHECK_THROWS_WITH_AS(DocEmbedder::fit(all_rare, cfg),
                         doctest::Contains("count threshold"), DataError);

    EmbedConfig zero = small_config();
    zero.dim = 0;
    std::vector<std::string> ok_docs = {"a a b b"};
    CHECK_THROWS_AS(DocEmbedder::fit(ok_docs, zero), DataError);
}

TEST_CASE("save and load reproduce inference bit for bit") {
    testutil::TempDir tmp("emb");
    std::vector<std::string> docs = cluster_corpus(10);
    DocEmbedder emb = DocEmbedder::fit(docs, small_config());
    emb.save_file(tmp.path("model.emb"));

    DocEmbedder back = DocEmbedder::load_file(tmp.path("model.emb"));
    CHECK(back.doc_count() == emb.doc_count());
    CHECK(back.vocab_size() == emb.vocab_size());
    CHECK(back.config().seed == emb.config().seed);
    CHECK(back.config().epochs == emb.config().epochs);
    CHECK(back.epoch_probe_loss() == emb.epoch_probe_loss());
    for (size_t i = 0; i < emb.doc_count(); ++i)
        CHECK(bit_equal(back.doc_vector(i), emb.doc_vector(i)));
    for (const std::string& text : {docs[0], docs[1], std::string("oven torque")})
        CHECK(bit_equal(back.infer(text), emb.infer(text)));

    // Double round trip writes identical bytes.
    back.save_file(tmp.path("model2.emb"));
    CHECK(read_file_bytes(tmp.path("model.emb")) ==
          read_file_bytes(tmp.path("model2.emb")));

    testutil::write_text_file(tmp.path("junk.emb"), "not an embedding");
    CHECK_THROWS_WITH_AS(DocEmbedder::load_file(tmp.path("junk.emb")),
                         doctest::Contains("not a document-embedding file"), IoError);
}

TEST_CASE("dense_from_f32 widens floats") {
    std::vector<float> f = {1.5f, -2.0f, 0.25f};
    DenseVector d = dense_from_f32(f);
    REQUIRE(d.size() == 3);
    CHECK(d.values[0] == 1.5);
    CHECK(d.values[1] == -2.0);
    CHECK(d.values[2] == 0.25);
}
