#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "socmap/error.hpp"
#include "socmap/evaluation.hpp"
#include "socmap/metrics.hpp"
#include "socmap/rng.hpp"

namespace socmap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<uint32_t> label_indices(const Dataset& data, const LabelMap& labels) {
    std::vector<uint32_t> y(data.size());
    for (size_t i = 0; i < data.size(); ++i)
        y[i] = labels.index_of(data.record(i).soc_code);
    return y;
}

void validate_folds(const std::vector<FoldSplit>& folds, std::span<const uint32_t> y,
                    const LabelMap& labels) {
    std::vector<char> seen(labels.size());
    for (size_t f = 0; f < folds.size(); ++f) {
        std::fill(seen.begin(), seen.end(), 0);
        for (size_t idx : folds[f].train_indices) seen[y[idx]] = 1;
        for (uint32_t c = 0; c < labels.size(); ++c) {
            if (!seen[c])
                throw DataError("cross-validation fold " + std::to_string(f) +
                                " training slice is missing label \"" +
                                labels.label_of(c) +
                                "\"; use fewer folds or more data per class");
        }
    }
}

FoldMetrics score_fold(uint32_t fold, std::span<const uint32_t> y_true,
                       std::span<const uint32_t> y_pred, uint32_t class_count,
                       double train_time_s) {
    FoldMetrics m;
    m.fold = fold;
    m.accuracy = accuracy(y_true, y_pred);
    m.precision = macro_precision(y_true, y_pred, class_count);
    m.recall = macro_recall(y_true, y_pred, class_count);
    m.f1 = macro_f1(y_true, y_pred, class_count);
    m.train_time_s = train_time_s;
    return m;
}

} // namespace

const std::vector<Representation>& all_representations() {
    static const std::vector<Representation> reps = {Representation::tfidf,
                                                     Representation::doc2vec};
    return reps;
}

std::string representation_name(Representation r) {
    return r == Representation::tfidf ? "tfidf" : "doc2vec";
}

Representation parse_representation(const std::string& name) {
    if (name == "tfidf") return Representation::tfidf;
    if (name == "doc2vec") return Representation::doc2vec;
    throw UsageError("unknown representation \"" + name +
                     "\" (expected tfidf or doc2vec)");
}

double EvalRow::mean(double FoldMetrics::*field) const {
    if (folds.empty()) return 0.0;
    double acc = 0.0;
    for (const FoldMetrics& f : folds) acc += f.*field;
    return acc / double(folds.size());
}

double EvalRow::stddev(double FoldMetrics::*field) const {
    if (folds.empty()) return 0.0;
    double mu = mean(field);
    double acc = 0.0;
    for (const FoldMetrics& f : folds) {
        double d = f.*field - mu;
        acc += d * d;
    }
    return std::sqrt(acc / double(folds.size()));
}

FoldFeatures fit_fold_features(Representation rep, const Dataset& data,
                               const FoldSplit& split, const VectorizerConfig& tf_cfg,
                               const EmbedConfig& em_cfg) {
    FoldFeatures ff;
    Clock::time_point t0 = Clock::now();

    if (rep == Representation::tfidf) {
        std::vector<Record> train_records;
        train_records.reserve(split.train_indices.size());
        for (size_t idx : split.train_indices) train_records.push_back(data.record(idx));
        Dataset train_ds(std::move(train_records));

        TfidfModel model = tfidf_fit(train_ds, tf_cfg);
        std::vector<SparseVector> train_rows;
        train_rows.reserve(split.train_indices.size());
        for (const Record& r : train_ds.records())
            train_rows.push_back(tfidf_transform(model, r.job_description));
        ff.train = FeatureMatrix::from_sparse(std::move(train_rows), model.dim());
        ff.fit_seconds = seconds_since(t0);

        std::vector<SparseVector> test_rows;
        test_rows.reserve(split.test_indices.size());
        for (size_t idx : split.test_indices)
            test_rows.push_back(tfidf_transform(model, data.record(idx).job_description));
        ff.test = FeatureMatrix::from_sparse(std::move(test_rows), model.dim());
        return ff;
    }

    std::vector<std::string> texts;
    texts.reserve(split.train_indices.size());
    for (size_t idx : split.train_indices)
        texts.push_back(data.record(idx).job_description);
    DocEmbedder emb = DocEmbedder::fit(texts, em_cfg);

    std::vector<DenseVector> train_rows;
    train_rows.reserve(texts.size());
    for (size_t i = 0; i < texts.size(); ++i)
        train_rows.push_back(dense_from_f32(emb.doc_vector(i)));
    ff.train = FeatureMatrix::from_dense(std::move(train_rows), emb.dim());
    ff.fit_seconds = seconds_since(t0);

    std::vector<DenseVector> test_rows;
    test_rows.reserve(split.test_indices.size());
    for (size_t idx : split.test_indices)
        test_rows.push_back(dense_from_f32(emb.infer(data.record(idx).job_description)));
    ff.test = FeatureMatrix::from_dense(std::move(test_rows), emb.dim());
    return ff;
}

namespace {

FoldMetrics run_fold(uint32_t fold, const FoldFeatures& ff, const ClassifierSpec& spec,
                     std::span<const uint32_t> y, const FoldSplit& split,
                     uint32_t class_count) {
    std::vector<uint32_t> y_train;
    y_train.reserve(split.train_indices.size());
    for (size_t idx : split.train_indices) y_train.push_back(y[idx]);
    std::vector<uint32_t> y_test;
    y_test.reserve(split.test_indices.size());
    for (size_t idx : split.test_indices) y_test.push_back(y[idx]);

    Clock::time_point t0 = Clock::now();
    TrainedClassifier model = fit_classifier(spec, ff.train, y_train);
    double clf_seconds = seconds_since(t0);

    std::vector<uint32_t> y_pred = predict_all(model, ff.test);
    return score_fold(fold, y_test, y_pred, class_count,
                      ff.fit_seconds + clf_seconds);
}

} // namespace

EvalRow cross_validate(Representation rep, const ClassifierSpec& spec,
                       const Dataset& data, const CvConfig& cv,
                       const VectorizerConfig& tf_cfg, const EmbedConfig& em_cfg) {
    LabelMap labels = LabelMap::from_dataset(data);
    std::vector<uint32_t> y = label_indices(data, labels);
    std::vector<FoldSplit> folds = kfold_split(data, cv);
    validate_folds(folds, y, labels);

    EvalRow row;
    row.representation = rep;
    row.algorithm = spec.algorithm;
    for (uint32_t f = 0; f < folds.size(); ++f) {
        FoldFeatures ff = fit_fold_features(rep, data, folds[f], tf_cfg, em_cfg);
        row.folds.push_back(run_fold(f, ff, spec, y, folds[f], labels.size()));
    }
    return row;
}

BenchmarkReport benchmark_all(const Dataset& data, const CvConfig& cv, uint64_t seed,
                              const VectorizerConfig& tf_cfg, const EmbedConfig& em_cfg) {
    LabelMap labels = LabelMap::from_dataset(data);
    std::vector<uint32_t> y = label_indices(data, labels);
    std::vector<FoldSplit> folds = kfold_split(data, cv);
    validate_folds(folds, y, labels);

    BenchmarkReport report;
    report.dataset_size = data.size();
    report.class_count = labels.size();
    report.fold_count = uint32_t(folds.size());
    report.seed = seed;
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(data.content_hash()));
        report.dataset_fingerprint = buf;
    }

    for (Representation rep : all_representations())
        for (Algorithm algo : all_algorithms()) {
            EvalRow row;
            row.representation = rep;
            row.algorithm = algo;
            report.rows.push_back(std::move(row));
        }
    auto row_of = [&](Representation rep, Algorithm algo) -> EvalRow& {
        size_t r = rep == Representation::tfidf ? 0 : 1;
        return report.rows[r * all_algorithms().size() + size_t(algo)];
    };

    // Features are fitted once per (representation, fold) and shared by
    // all classifiers; the measured fitting time is charged to every row.
    // A vectorizer that cannot fit at all takes down every row of its
    // representation, never the other representation's rows.
    for (Representation rep : all_representations()) {
        for (uint32_t f = 0; f < folds.size(); ++f) {
            FoldFeatures ff;
            try {
                ff = fit_fold_features(rep, data, folds[f], tf_cfg, em_cfg);
            } catch (const std::exception& ex) {
                for (Algorithm algo : all_algorithms()) {
                    EvalRow& row = row_of(rep, algo);
                    if (!row.failed) {
                        row.failed = true;
                        row.error = ex.what();
                    }
                    row.folds.clear();
                }
                break;
            }
            for (Algorithm algo : all_algorithms()) {
                EvalRow& row = row_of(rep, algo);
                if (row.failed) continue;
                try {
                    row.folds.push_back(run_fold(f, ff, default_spec(algo, seed), y,
                                                 folds[f], labels.size()));
                } catch (const std::exception& ex) {
                    row.failed = true;
                    row.error = ex.what();
                }
            }
        }
    }
    return report;
}

// ---- report emission ----

namespace {

const char* kSeriesColor[2] = {"#4e79a7", "#f28e2b"};

std::string fmt_chart(double v, bool rate) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), rate ? "%.3f" : "%.3g", v);
    return buf;
}

double nice_ceil(double v) {
    if (!(v > 0.0)) return 1.0;
    double exp = std::floor(std::log10(v));
    double base = std::pow(10.0, exp);
    for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (v <= mult * base * (1.0 + 1e-12)) return mult * base;
    return 10.0 * base;
}

// Minimal grouped-bar chart; one group per algorithm, one bar per
// representation, means annotated above the bars.
void write_grouped_bars(const std::string& path, const std::string& title,
                        const std::string& ylabel,
                        const std::vector<std::string>& groups,
                        const std::vector<std::string>& series,
                        const std::vector<std::vector<double>>& values,
                        const std::vector<std::vector<bool>>& present, bool rate) {
    const double width = 860, height = 440;
    const double ml = 64, mr = 16, mt = 44, mb = 84;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const double base_y = mt + ph;

    double ymax = 1.0;
    if (!rate) {
        double m = 0.0;
        for (size_t s = 0; s < values.size(); ++s)
            for (size_t g = 0; g < values[s].size(); ++g)
                if (present[s][g]) m = std::max(m, values[s][g]);
        ymax = nice_ceil(m * 1.05);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write chart: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"17\" font-weight=\"bold\">" << title << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << ylabel << "</text>\n";

    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        double v = ymax * t / ticks;
        double yy = base_y - ph * t / ticks;
        out << "<line x1=\"" << ml << "\" y1=\"" << yy << "\" x2=\"" << ml + pw
            << "\" y2=\"" << yy << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << yy + 4
            << "\" text-anchor=\"end\" font-size=\"12\">" << fmt_chart(v, rate)
            << "</text>\n";
    }

    const size_t ngroups = groups.size();
    const size_t nseries = series.size();
    const double group_w = pw / double(ngroups);
    const double bar_w = std::min(34.0, group_w / double(nseries) - 8.0);
    for (size_t g = 0; g < ngroups; ++g) {
        double gx = ml + group_w * double(g);
        double cluster_w = bar_w * double(nseries) + 4.0 * double(nseries - 1);
        double x0 = gx + (group_w - cluster_w) / 2.0;
        for (size_t s = 0; s < nseries; ++s) {
            double bx = x0 + double(s) * (bar_w + 4.0);
            if (!present[s][g]) {
                out << "<text x=\"" << bx + bar_w / 2 << "\" y=\"" << base_y - 6
                    << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#888888\">"
                    << "n/a</text>\n";
                continue;
            }
            double v = values[s][g];
            double h = ymax > 0.0 ? ph * v / ymax : 0.0;
            if (h < 0.0) h = 0.0;
            if (h > ph) h = ph;
            out << "<rect x=\"" << bx << "\" y=\"" << base_y - h << "\" width=\""
                << bar_w << "\" height=\"" << h << "\" fill=\"" << kSeriesColor[s % 2]
                << "\"/>\n";
            out << "<text x=\"" << bx + bar_w / 2 << "\" y=\"" << base_y - h - 4
                << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_chart(v, rate)
                << "</text>\n";
        }
        out << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << base_y + 18
            << "\" text-anchor=\"middle\" font-size=\"12\">" << groups[g]
            << "</text>\n";
    }

    double lx = ml + pw - 150.0, ly = mt - 30.0;
    for (size_t s = 0; s < nseries; ++s) {
        out << "<rect x=\"" << lx << "\" y=\"" << ly + double(s) * 18 << "\" width=\"12\""
            << " height=\"12\" fill=\"" << kSeriesColor[s % 2] << "\"/>\n";
        out << "<text x=\"" << lx + 18 << "\" y=\"" << ly + double(s) * 18 + 10
            << "\" font-size=\"12\">" << series[s] << "</text>\n";
    }
    out << "<line x1=\"" << ml << "\" y1=\"" << base_y << "\" x2=\"" << ml + pw
        << "\" y2=\"" << base_y << "\" stroke=\"#333333\"/>\n";
    out << "</svg>\n";
}

} // namespace

void emit_report(const BenchmarkReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create report directory: " + out_dir);

    // Aggregate table, one row per (representation, algorithm).
    {
        std::ofstream out(fs::path(out_dir) / "report.csv", std::ios::binary);
        if (!out) throw IoError("cannot write report.csv");
        out << "representation,algorithm,fold_count,status,accuracy_mean,accuracy_std,"
               "precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
               "train_time_s_mean,train_time_s_std,error\n";
        for (const EvalRow& row : report.rows) {
            out << representation_name(row.representation) << ','
                << algorithm_name(row.algorithm) << ',' << row.folds.size() << ','
                << (row.failed ? "failed" : "ok") << ',';
            if (row.failed) {
                out << ",,,,,,,,,," << csv_escape(row.error) << "\n";
                continue;
            }
            out << fmt17(row.mean(&FoldMetrics::accuracy)) << ','
                << fmt17(row.stddev(&FoldMetrics::accuracy)) << ','
                << fmt17(row.mean(&FoldMetrics::precision)) << ','
                << fmt17(row.stddev(&FoldMetrics::precision)) << ','
                << fmt17(row.mean(&FoldMetrics::recall)) << ','
                << fmt17(row.stddev(&FoldMetrics::recall)) << ','
                << fmt17(row.mean(&FoldMetrics::f1)) << ','
                << fmt17(row.stddev(&FoldMetrics::f1)) << ','
                << fmt17(row.mean(&FoldMetrics::train_time_s)) << ','
                << fmt17(row.stddev(&FoldMetrics::train_time_s)) << ",\n";
        }
    }

    // Per-fold trace.
    {
        std::ofstream out(fs::path(out_dir) / "folds.csv", std::ios::binary);
        if (!out) throw IoError("cannot write folds.csv");
        out << "representation,algorithm,fold,accuracy,precision,recall,f1,"
               "train_time_s\n";
        for (const EvalRow& row : report.rows)
            for (const FoldMetrics& f : row.folds)
                out << representation_name(row.representation) << ','
                    << algorithm_name(row.algorithm) << ',' << f.fold << ','
                    << fmt17(f.accuracy) << ',' << fmt17(f.precision) << ','
                    << fmt17(f.recall) << ',' << fmt17(f.f1) << ','
                    << fmt17(f.train_time_s) << "\n";
    }

    {
        nlohmann::json doc;
        doc["dataset"] = {{"size", report.dataset_size},
                          {"class_count", report.class_count},
                          {"fingerprint", report.dataset_fingerprint}};
        doc["cross_validation"] = {{"fold_count", report.fold_count},
                                   {"seed", report.seed}};
        doc["rows"] = nlohmann::json::array();
        for (const EvalRow& row : report.rows) {
            nlohmann::json jr;
            jr["representation"] = representation_name(row.representation);
            jr["algorithm"] = algorithm_name(row.algorithm);
            jr["status"] = row.failed ? "failed" : "ok";
            if (row.failed) jr["error"] = row.error;
            jr["folds"] = nlohmann::json::array();
            for (const FoldMetrics& f : row.folds)
                jr["folds"].push_back({{"fold", f.fold},
                                       {"accuracy", f.accuracy},
                                       {"precision", f.precision},
                                       {"recall", f.recall},
                                       {"f1", f.f1},
                                       {"train_time_s", f.train_time_s}});
            if (!row.failed) {
                jr["mean"] = {{"accuracy", row.mean(&FoldMetrics::accuracy)},
                              {"precision", row.mean(&FoldMetrics::precision)},
                              {"recall", row.mean(&FoldMetrics::recall)},
                              {"f1", row.mean(&FoldMetrics::f1)},
                              {"train_time_s", row.mean(&FoldMetrics::train_time_s)}};
                jr["std"] = {{"accuracy", row.stddev(&FoldMetrics::accuracy)},
                             {"precision", row.stddev(&FoldMetrics::precision)},
                             {"recall", row.stddev(&FoldMetrics::recall)},
                             {"f1", row.stddev(&FoldMetrics::f1)},
                             {"train_time_s", row.stddev(&FoldMetrics::train_time_s)}};
            }
            doc["rows"].push_back(std::move(jr));
        }
        std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
        if (!out) throw IoError("cannot write report.json");
        out << doc.dump(2) << "\n";
    }

    std::vector<std::string> groups;
    for (Algorithm a : all_algorithms()) groups.push_back(algorithm_name(a));
    std::vector<std::string> series;
    for (Representation r : all_representations()) series.push_back(representation_name(r));

    struct ChartSpec {
        const char* file;
        const char* title;
        const char* ylabel;
        double FoldMetrics::*field;
        bool rate;
    };
    const ChartSpec charts[] = {
        {"accuracy.svg", "Mean accuracy by algorithm", "accuracy",
         &FoldMetrics::accuracy, true},
        {"precision.svg", "Mean macro precision by algorithm", "macro precision",
         &FoldMetrics::precision, true},
        {"recall.svg", "Mean macro recall by algorithm", "macro recall",
         &FoldMetrics::recall, true},
        {"f1.svg", "Mean macro F1 by algorithm", "macro F1", &FoldMetrics::f1, true},
        {"train_time.svg", "Mean training time by algorithm", "seconds",
         &FoldMetrics::train_time_s, false},
    };
    for (const ChartSpec& cs : charts) {
        std::vector<std::vector<double>> values(series.size(),
                                                std::vector<double>(groups.size(), 0.0));
        std::vector<std::vector<bool>> present(series.size(),
                                               std::vector<bool>(groups.size(), false));
        for (const EvalRow& row : report.rows) {
            size_t s = row.representation == Representation::tfidf ? 0 : 1;
            size_t g = size_t(row.algorithm);
            if (!row.failed && !row.folds.empty()) {
                values[s][g] = row.mean(cs.field);
                present[s][g] = true;
            }
        }
        write_grouped_bars((fs::path(out_dir) / cs.file).string(), cs.title, cs.ylabel,
                           groups, series, values, present, cs.rate);
    }
}

} // namespace socmap
