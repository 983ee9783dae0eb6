#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "socmap/corpus.hpp"
#include "test_util.hpp"

using namespace socmap;

TEST_CASE("csv loader handles quoting, CRLF and embedded newlines") {
    testutil::TempDir tmp("csv");
    std::string csv =
        "job_title,job_description,company_name,soc_code,soc_occupation\r\n"
        "\"Senior, Analyst\",\"Builds \"\"dashboards\"\"\nand reports\",Acme,13-1111,Analysts\r\n"
        "Clerk,Files papers,\"Box, Inc\",43-9061,Office Clerks\n";
    testutil::write_text_file(tmp.path("a.csv"), csv);

    LoadStats stats;
    Dataset d = load_dataset(tmp.path("a.csv"), DataFormat::csv, &stats);
    REQUIRE(d.size() == 2);
    CHECK(stats.rows_seen == 2);
    CHECK(stats.rows_dropped == 0);
    CHECK(d.record(0).job_title == "Senior, Analyst");
    CHECK(d.record(0).job_description == "Builds \"dashboards\"\nand reports");
    CHECK(d.record(0).soc_code == "13-1111");
    CHECK(d.record(1).company_name == "Box, Inc");
    CHECK(d.labels() == std::vector<std::string>{"13-1111", "43-9061"});
}

TEST_CASE("csv loader drops rows with blank required fields") {
    testutil::TempDir tmp("csvdrop");
    std::string csv =
        "job_description,soc_code\n"
        "does things,11-1011\n"
        "   ,11-1011\n"
        "works hard,\n"
        "more things,15-1252\n";
    testutil::write_text_file(tmp.path("b.csv"), csv);
    LoadStats stats;
    Dataset d = load_dataset(tmp.path("b.csv"), DataFormat::csv, &stats);
    CHECK(d.size() == 2);
    CHECK(stats.rows_seen == 4);
    CHECK(stats.rows_dropped == 2);
}

TEST_CASE("csv loader reports malformed input with the row number") {
    testutil::TempDir tmp("csvbad");
    testutil::write_text_file(tmp.path("short.csv"),
                              "job_description,soc_code\nonly one field\n");
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path("short.csv"), DataFormat::csv),
                         doctest::Contains("row 1"), DataError);

    testutil::write_text_file(tmp.path("nohdr.csv"), "");
    CHECK_THROWS_AS(load_dataset(tmp.path("nohdr.csv"), DataFormat::csv), DataError);

    testutil::write_text_file(tmp.path("nocol.csv"), "job_title,soc_code\nx,11-1011\n");
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path("nocol.csv"), DataFormat::csv),
                         doctest::Contains("job_description"), DataError);

    CHECK_THROWS_AS(load_dataset(tmp.path("absent.csv"), DataFormat::csv), IoError);
}

TEST_CASE("jsonl loader parses objects and flags bad rows") {
    testutil::TempDir tmp("jsonl");
    std::string jl =
        R"({"job_description": "fixes pipes", "soc_code": "47-2152"})" "\n"
        "\n"
        R"({"job_title": "RN", "job_description": "cares for patients", "soc_code": "29-1141", "company_name": "Mercy"})" "\n";
    testutil::write_text_file(tmp.path("a.jsonl"), jl);
    LoadStats stats;
    Dataset d = load_dataset(tmp.path("a.jsonl"), DataFormat::jsonl, &stats);
    REQUIRE(d.size() == 2);
    CHECK(d.record(1).job_title == "RN");
    CHECK(d.record(1).company_name == "Mercy");

    testutil::write_text_file(tmp.path("bad.jsonl"), "{\"job_description\": \"x\"\n");
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path("bad.jsonl"), DataFormat::jsonl),
                         doctest::Contains("row 1"), DataError);

    testutil::write_text_file(tmp.path("arr.jsonl"), "[1,2,3]\n");
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path("arr.jsonl"), DataFormat::jsonl),
                         doctest::Contains("not an object"), DataError);
}

TEST_CASE("dataset save and load round trip both formats") {
    testutil::TempDir tmp("rt");
    std::vector<Record> recs = {
        {"T1", "description, with commas", "C\"o", "11-1011", "Execs"},
        {"", "plain text", "", "15-1252", ""},
        {"T3", "line\nbreak", "Co", "11-1011", "Execs"},
    };
    Dataset d(recs);
    for (DataFormat f : {DataFormat::csv, DataFormat::jsonl}) {
        std::string path =
            tmp.path(f == DataFormat::csv ? "round.csv" : "round.jsonl");
        save_dataset(d, path, f);
        Dataset back = load_dataset(path, f);
        REQUIRE(back.size() == d.size());
        for (size_t i = 0; i < d.size(); ++i) {
            CHECK(back.record(i).job_title == d.record(i).job_title);
            CHECK(back.record(i).job_description == d.record(i).job_description);
            CHECK(back.record(i).company_name == d.record(i).company_name);
            CHECK(back.record(i).soc_code == d.record(i).soc_code);
            CHECK(back.record(i).soc_occupation == d.record(i).soc_occupation);
        }
        CHECK(back.content_hash() == d.content_hash());
    }
}

TEST_CASE("format helpers") {
    CHECK(parse_data_format("csv") == DataFormat::csv);
    CHECK(parse_data_format("jsonl") == DataFormat::jsonl);
    CHECK_THROWS_AS(parse_data_format("tsv"), UsageError);
    CHECK(guess_data_format("data/x.jsonl") == DataFormat::jsonl);
    CHECK(guess_data_format("x.ndjson") == DataFormat::jsonl);
    CHECK(guess_data_format("x.csv") == DataFormat::csv);
    CHECK(guess_data_format("noext") == DataFormat::csv);
}

TEST_CASE("trim_copy strips ASCII whitespace") {
    CHECK(trim_copy("  a b \t\r\n") == "a b");
    CHECK(trim_copy("") == "");
    CHECK(trim_copy(" \t ") == "");
    CHECK(trim_copy("x") == "x");
}

TEST_CASE("label map is a bijection in lexicographic order") {
    std::vector<Record> recs;
    for (const char* code : {"29-1141", "11-1011", "29-1141", "15-1252"})
        recs.push_back({"", "desc", "", code, ""});
    Dataset d(recs);
    LabelMap m = LabelMap::from_dataset(d);
    REQUIRE(m.size() == 3);
    CHECK(m.labels() == std::vector<std::string>{"11-1011", "15-1252", "29-1141"});
    for (uint32_t i = 0; i < m.size(); ++i) CHECK(m.index_of(m.label_of(i)) == i);
    CHECK(m.contains("15-1252"));
    CHECK(!m.contains("99-9999"));
    CHECK_THROWS_AS(m.index_of("99-9999"), DataError);
    CHECK_THROWS_AS(LabelMap({"a", "b", "a"}), DataError);
}

TEST_CASE("filter_top_k keeps frequent labels, ties to lexicographic order") {
    std::vector<Record> recs;
    auto add = [&](const std::string& code, int n) {
        for (int i = 0; i < n; ++i) recs.push_back({"", "d", "", code, ""});
    };
    add("C", 3);
    add("A", 2);
    add("B", 2);
    add("D", 1);
    Dataset d(recs);

    Dataset top2 = filter_top_k_labels(d, 2);
    // C wins on count; A and B tie at 2 and A is lexicographically first.
    CHECK(top2.labels() == std::vector<std::string>{"A", "C"});
    CHECK(top2.size() == 5);
    // Record order is preserved.
    CHECK(top2.record(0).soc_code == "C");
    CHECK(top2.record(3).soc_code == "A");

    Dataset all = filter_top_k_labels(d, 10);
    CHECK(all.size() == d.size());
}

TEST_CASE("kfold slices are disjoint, exhaustive and balanced") {
    std::vector<Record> recs;
    for (int i = 0; i < 23; ++i)
        recs.push_back({"", "doc " + std::to_string(i), "", "L" + std::to_string(i % 3), ""});
    Dataset d(recs);

    for (uint32_t k : {2u, 5u, 10u}) {
        CvConfig cv;
        cv.fold_count = k;
        cv.shuffle_seed = 42;
        std::vector<FoldSplit> folds = kfold_split(d, cv);
        REQUIRE(folds.size() == k);

        std::set<size_t> seen;
        size_t min_sz = d.size(), max_sz = 0;
        for (const FoldSplit& f : folds) {
            min_sz = std::min(min_sz, f.test_indices.size());
            max_sz = std::max(max_sz, f.test_indices.size());
            std::set<size_t> test(f.test_indices.begin(), f.test_indices.end());
            std::set<size_t> train(f.train_indices.begin(), f.train_indices.end());
            CHECK(test.size() == f.test_indices.size());
            CHECK(train.size() == f.train_indices.size());
            CHECK(test.size() + train.size() == d.size());
            for (size_t t : test) CHECK(!train.count(t));
            for (size_t t : test) {
                CHECK(!seen.count(t));
                seen.insert(t);
            }
        }
        CHECK(seen.size() == d.size());
        CHECK(max_sz - min_sz <= 1);
    }
}

TEST_CASE("kfold is deterministic in the seed") {
    std::vector<Record> recs;
    for (int i = 0; i < 40; ++i)
        recs.push_back({"", "doc " + std::to_string(i), "", "X", ""});
    Dataset d(recs);
    CvConfig cv;
    cv.fold_count = 4;
    cv.shuffle_seed = 7;
    std::vector<FoldSplit> a = kfold_split(d, cv);
    std::vector<FoldSplit> b = kfold_split(d, cv);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].train_indices == b[i].train_indices);
        CHECK(a[i].test_indices == b[i].test_indices);
    }
    cv.shuffle_seed = 8;
    std::vector<FoldSplit> c = kfold_split(d, cv);
    bool any_diff = false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].test_indices != c[i].test_indices) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("synthetic corpus is deterministic and well formed") {
    SynthConfig cfg;
    cfg.class_count = 4;
    cfg.docs_per_class = 25;
    cfg.seed = 3;
    Dataset a = generate_synthetic(cfg);
    Dataset b = generate_synthetic(cfg);
    REQUIRE(a.size() == 100);
    CHECK(a.content_hash() == b.content_hash());
    CHECK(a.labels().size() == 4);

    std::map<std::string, size_t> counts = a.label_counts();
    for (const auto& [label, n] : counts) CHECK(n == 25);

    for (const Record& r : a.records()) {
        CHECK(!r.job_description.empty());
        CHECK(!r.soc_code.empty());
        // Token budget is 30..80 per document.
        size_t tokens = 1 + std::count(r.job_description.begin(),
                                       r.job_description.end(), ' ');
        CHECK(tokens >= 30);
        CHECK(tokens <= 80);
    }

    cfg.seed = 4;
    Dataset c = generate_synthetic(cfg);
    CHECK(c.content_hash() != a.content_hash());
}
