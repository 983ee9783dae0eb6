#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "socmap/corpus.hpp"
#include "socmap/error.hpp"
#include "socmap/evaluation.hpp"
#include "socmap/pipeline.hpp"
#include "socmap/service.hpp"

namespace {

using nlohmann::json;
using namespace socmap;

ModelService* g_service = nullptr;

void handle_signal(int) {
    if (g_service != nullptr) g_service->stop();
}

// Options absent from the command line (and its environment fallbacks) are
// filled from the --config JSON document, so the precedence is
// flags > environment > config file > built-in defaults.
class ConfigMerge {
public:
    template <typename T>
    void watch(CLI::Option* opt, std::string key, T& var) {
        entries_.push_back({opt, std::move(key), [&var](const json& v) {
                                var = v.get<T>();
                            }});
    }

    void apply(const json& cfg) const {
        for (const Entry& e : entries_) {
            if (e.opt->count() > 0 || !cfg.contains(e.key)) continue;
            try {
                e.set(cfg.at(e.key));
            } catch (const json::exception&) {
                throw UsageError("config key \"" + e.key + "\" has the wrong type");
            }
        }
    }

private:
    struct Entry {
        CLI::Option* opt;
        std::string key;
        std::function<void(const json&)> set;
    };
    std::vector<Entry> entries_;
};

json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json cfg = json::parse(ss.str(), nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object())
        throw UsageError("config file must contain a JSON object: " + path);
    return cfg;
}

DataFormat resolve_format(const std::string& flag, const std::string& path) {
    if (flag == "auto") return guess_data_format(path);
    return parse_data_format(flag);
}

Dataset load_input(const std::string& path, const std::string& format, size_t top_labels,
                   LoadStats* stats) {
    Dataset d = load_dataset(path, resolve_format(format, path), stats);
    if (top_labels > 0) d = filter_top_k_labels(d, top_labels);
    if (d.empty()) throw DataError("no usable records in " + path);
    return d;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- synth ----

struct SynthArgs {
    std::string out;
    std::string format = "auto";
    SynthConfig cfg;
};

void run_synth(const SynthArgs& a) {
    Dataset d = generate_synthetic(a.cfg);
    save_dataset(d, a.out, resolve_format(a.format, a.out));
    std::cout << "wrote " << d.size() << " records (" << d.labels().size()
              << " labels) to " << a.out << "\n";
}

// ---- inspect ----

struct InspectArgs {
    std::string data;
    std::string format = "auto";
    bool as_json = false;
};

void run_inspect(const InspectArgs& a) {
    LoadStats stats;
    Dataset d = load_dataset(a.data, resolve_format(a.format, a.data), &stats);
    char fp[32];
    std::snprintf(fp, sizeof(fp), "%016llx",
                  static_cast<unsigned long long>(d.content_hash()));
    if (a.as_json) {
        json out = {{"path", a.data},
                    {"rows", d.size()},
                    {"rows_seen", stats.rows_seen},
                    {"rows_dropped", stats.rows_dropped},
                    {"fingerprint", fp},
                    {"labels", json::object()}};
        for (const auto& [label, count] : d.label_counts())
            out["labels"][label] = count;
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::cout << a.data << ": " << d.size() << " records (" << stats.rows_seen
              << " rows read, " << stats.rows_dropped << " dropped)\n";
    std::cout << "fingerprint: " << fp << "\n";
    std::cout << d.labels().size() << " labels:\n";
    for (const auto& [label, count] : d.label_counts())
        std::cout << "  " << label << "  " << count << "\n";
}

// ---- shared vectorizer/classifier flag bundles ----

struct FeatureArgs {
    VectorizerConfig tfidf;
    EmbedConfig embed;
};

void add_feature_flags(CLI::App* cmd, ConfigMerge& merge, FeatureArgs& f) {
    merge.watch(cmd->add_option("--ngram-min", f.tfidf.n_min,
                                "smallest n-gram length")->capture_default_str(),
                "ngram_min", f.tfidf.n_min);
    merge.watch(cmd->add_option("--ngram-max", f.tfidf.n_max,
                                "largest n-gram length")->capture_default_str(),
                "ngram_max", f.tfidf.n_max);
    merge.watch(cmd->add_option("--min-df", f.tfidf.min_df,
                                "drop n-grams below this document-frequency "
                                "proportion")->capture_default_str(),
                "min_df", f.tfidf.min_df);
    merge.watch(cmd->add_option("--max-df", f.tfidf.max_df,
                                "drop n-grams above this document-frequency "
                                "proportion")->capture_default_str(),
                "max_df", f.tfidf.max_df);
    merge.watch(cmd->add_option("--dim", f.embed.dim,
                                "embedding dimensions")->capture_default_str(),
                "dim", f.embed.dim);
    merge.watch(cmd->add_option("--embed-epochs", f.embed.epochs,
                                "embedding training epochs")->capture_default_str(),
                "embed_epochs", f.embed.epochs);
    merge.watch(cmd->add_option("--negative", f.embed.negative_samples,
                                "negative samples per position")->capture_default_str(),
                "negative", f.embed.negative_samples);
    merge.watch(cmd->add_option("--min-count", f.embed.min_token_count,
                                "minimum token count for the embedding "
                                "vocabulary")->capture_default_str(),
                "min_count", f.embed.min_token_count);
    merge.watch(cmd->add_option("--lr", f.embed.initial_learning_rate,
                                "initial embedding learning rate")->capture_default_str(),
                "lr", f.embed.initial_learning_rate);
}

struct ClassifierArgs {
    std::string algorithm = "logreg";
    ClassifierSpec spec;
};

void add_classifier_flags(CLI::App* cmd, ConfigMerge& merge, ClassifierArgs& c) {
    ClassifierSpec& s = c.spec;
    merge.watch(cmd->add_option("--algorithm", c.algorithm,
                                "knn, gnb, logreg, linear_svm, svc_rbf, tree or "
                                "forest")->capture_default_str(),
                "algorithm", c.algorithm);
    merge.watch(cmd->add_option("--knn-k", s.knn.k, "neighbors for knn")
                    ->capture_default_str(),
                "knn_k", s.knn.k);
    merge.watch(cmd->add_option("--var-smoothing", s.gnb.var_smoothing,
                                "gnb variance smoothing fraction")->capture_default_str(),
                "var_smoothing", s.gnb.var_smoothing);
    merge.watch(cmd->add_option("--l2", s.logreg.l2_strength,
                                "logreg L2 strength")->capture_default_str(),
                "l2", s.logreg.l2_strength);
    merge.watch(cmd->add_option("--max-iter", s.logreg.max_iter,
                                "logreg iteration cap")->capture_default_str(),
                "max_iter", s.logreg.max_iter);
    merge.watch(cmd->add_option("--svm-c", s.linear_svm.c,
                                "SVM regularization C (linear and rbf)")
                    ->capture_default_str(),
                "svm_c", s.linear_svm.c);
    merge.watch(cmd->add_option("--svm-epochs", s.linear_svm.max_epochs,
                                "linear SVM epochs")->capture_default_str(),
                "svm_epochs", s.linear_svm.max_epochs);
    merge.watch(cmd->add_option("--gamma", s.svc_rbf.gamma,
                                "rbf gamma; 0 scales by feature variance")
                    ->capture_default_str(),
                "gamma", s.svc_rbf.gamma);
    merge.watch(cmd->add_option("--max-passes", s.svc_rbf.max_passes,
                                "rbf solver sweep cap")->capture_default_str(),
                "max_passes", s.svc_rbf.max_passes);
    merge.watch(cmd->add_option("--min-samples-split", s.tree.min_samples_split,
                                "minimum node size to split")->capture_default_str(),
                "min_samples_split", s.tree.min_samples_split);
    merge.watch(cmd->add_option("--max-depth", s.tree.max_depth,
                                "tree depth cap; 0 is unlimited")->capture_default_str(),
                "max_depth", s.tree.max_depth);
    merge.watch(cmd->add_option("--estimators", s.forest.n_estimators,
                                "trees in the forest")->capture_default_str(),
                "estimators", s.forest.n_estimators);
    merge.watch(cmd->add_option("--features-per-split", s.forest.features_per_split,
                                "features sampled per node; 0 is ceil(sqrt(dim))")
                    ->capture_default_str(),
                "features_per_split", s.forest.features_per_split);
    cmd->add_flag("--no-bootstrap", [&s](int64_t) { s.forest.bootstrap = false; },
                  "grow forest trees on the full training set");
}

ClassifierSpec finalize_spec(ClassifierArgs& c, uint64_t seed) {
    c.spec.algorithm = parse_algorithm(c.algorithm);
    c.spec.seed = seed;
    c.spec.svc_rbf.c = c.spec.linear_svm.c; // one flag feeds both SVMs
    c.spec.forest.tree = c.spec.tree;
    return c.spec;
}

// ---- train ----

struct TrainArgs {
    std::string data;
    std::string out;
    std::string format = "auto";
    std::string rep = "tfidf";
    uint64_t seed = 1;
    size_t top_labels = 0;
    bool as_json = false;
    FeatureArgs features;
    ClassifierArgs clf;
};

void run_train(TrainArgs& a) {
    Dataset d = load_input(a.data, a.format, a.top_labels, nullptr);
    Representation rep = parse_representation(a.rep);
    ClassifierSpec spec = finalize_spec(a.clf, a.seed);
    a.features.embed.seed = a.seed;

    auto t0 = std::chrono::steady_clock::now();
    Pipeline p = Pipeline::train(d, rep, spec, a.features.tfidf, a.features.embed);
    double elapsed = seconds_since(t0);
    p.save(a.out);

    const PipelineMeta& m = p.meta();
    if (a.as_json) {
        json out = {{"model", a.out},
                    {"model_version", m.model_version},
                    {"representation", representation_name(rep)},
                    {"algorithm", algorithm_name(spec.algorithm)},
                    {"rows", m.training_rows},
                    {"feature_dim", m.feature_dim},
                    {"class_count", m.class_count},
                    {"train_seconds", elapsed}};
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::printf("trained %s/%s on %llu rows (dim %u, %u labels) in %.2fs\n",
                representation_name(rep).c_str(),
                algorithm_name(spec.algorithm).c_str(),
                static_cast<unsigned long long>(m.training_rows), m.feature_dim,
                m.class_count, elapsed);
    std::printf("model_version %s\n", m.model_version.c_str());
    std::printf("wrote %s\n", a.out.c_str());
}

// ---- benchmark ----

struct BenchArgs {
    std::string data;
    std::string out;
    std::string format = "auto";
    uint32_t folds = 10;
    uint64_t seed = 1;
    size_t top_labels = 0;
    bool as_json = false;
    FeatureArgs features;
};

void run_benchmark(BenchArgs& a) {
    Dataset d = load_input(a.data, a.format, a.top_labels, nullptr);
    a.features.embed.seed = a.seed;
    CvConfig cv{a.folds, a.seed};
    BenchmarkReport report =
        benchmark_all(d, cv, a.seed, a.features.tfidf, a.features.embed);
    emit_report(report, a.out);

    if (a.as_json) {
        json rows = json::array();
        for (const EvalRow& r : report.rows) {
            json jr = {{"representation", representation_name(r.representation)},
                       {"algorithm", algorithm_name(r.algorithm)},
                       {"status", r.failed ? "failed" : "ok"}};
            if (r.failed) {
                jr["error"] = r.error;
            } else {
                jr["accuracy_mean"] = r.mean(&FoldMetrics::accuracy);
                jr["precision_mean"] = r.mean(&FoldMetrics::precision);
                jr["recall_mean"] = r.mean(&FoldMetrics::recall);
                jr["f1_mean"] = r.mean(&FoldMetrics::f1);
                jr["train_time_s_mean"] = r.mean(&FoldMetrics::train_time_s);
            }
            rows.push_back(std::move(jr));
        }
        json out = {{"out_dir", a.out},
                    {"dataset_size", report.dataset_size},
                    {"class_count", report.class_count},
                    {"fold_count", report.fold_count},
                    {"rows", std::move(rows)}};
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::printf("%-8s %-11s %9s %9s %9s %9s %10s\n", "rep", "algorithm", "acc",
                "prec", "rec", "f1", "time_s");
    for (const EvalRow& r : report.rows) {
        if (r.failed) {
            std::printf("%-8s %-11s failed: %s\n",
                        representation_name(r.representation).c_str(),
                        algorithm_name(r.algorithm).c_str(), r.error.c_str());
            continue;
        }
        std::printf("%-8s %-11s %9.4f %9.4f %9.4f %9.4f %10.3f\n",
                    representation_name(r.representation).c_str(),
                    algorithm_name(r.algorithm).c_str(),
                    r.mean(&FoldMetrics::accuracy), r.mean(&FoldMetrics::precision),
                    r.mean(&FoldMetrics::recall), r.mean(&FoldMetrics::f1),
                    r.mean(&FoldMetrics::train_time_s));
    }
    std::printf("report written to %s\n", a.out.c_str());
}

// ---- predict ----

struct PredictArgs {
    std::string model;
    std::string text;
    bool text_given = false;
    bool as_json = false;
};

void run_predict(PredictArgs& a) {
    if (a.model.empty())
        throw UsageError("no model given (use --model or SOCMAP_MODEL)");
    std::string description = a.text;
    if (!a.text_given) {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        description = ss.str();
    }
    if (trim_copy(description).empty())
        throw UsageError("no description given (use --text or pipe text on stdin)");

    Pipeline p = Pipeline::load(a.model);
    std::string label = p.predict_one(description);
    if (a.as_json) {
        json out = {{"soc_code", label},
                    {"model_version", p.meta().model_version}};
        std::cout << out.dump() << "\n";
        return;
    }
    std::cout << label << "\n";
}

// ---- serve ----

struct ServeArgs {
    std::string model;
    ServiceConfig cfg;
};

void run_serve(ServeArgs& a) {
    if (a.model.empty())
        throw UsageError("no model given (use --model or SOCMAP_MODEL)");
    auto pipeline = std::make_shared<const Pipeline>(Pipeline::load(a.model));
    ModelService service(pipeline, a.cfg);
    if (!service.bind())
        throw IoError("cannot bind " + a.cfg.host + ":" + std::to_string(a.cfg.port));

    g_service = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    std::printf("listening on http://%s:%d (model %s)\n", a.cfg.host.c_str(),
                service.port(), pipeline->meta().model_version.c_str());
    std::fflush(stdout);
    service.serve();
    g_service = nullptr;
    std::printf("shutting down\n");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"job-description to occupation-code toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON file supplying defaults for any option")
        ->envname("SOCMAP_CONFIG");

    ConfigMerge merge;

    CLI::App* data = app.add_subcommand("data", "dataset utilities");
    data->require_subcommand(1);

    SynthArgs synth;
    CLI::App* synth_cmd =
        data->add_subcommand("synth", "generate a synthetic labeled corpus");
    synth_cmd->fallthrough();
    synth_cmd->add_option("--out", synth.out, "output file")->required();
    merge.watch(synth_cmd->add_option("--format", synth.format, "csv, jsonl or auto")
                    ->capture_default_str(),
                "format", synth.format);
    merge.watch(synth_cmd->add_option("--classes", synth.cfg.class_count, "label count")
                    ->capture_default_str(),
                "classes", synth.cfg.class_count);
    merge.watch(synth_cmd
                    ->add_option("--docs-per-class", synth.cfg.docs_per_class,
                                 "documents per label")
                    ->capture_default_str(),
                "docs_per_class", synth.cfg.docs_per_class);
    merge.watch(synth_cmd
                    ->add_option("--vocab-per-class", synth.cfg.vocab_per_class,
                                 "keywords per label")
                    ->capture_default_str(),
                "vocab_per_class", synth.cfg.vocab_per_class);
    merge.watch(synth_cmd->add_option("--noise", synth.cfg.noise_rate,
                                      "probability a token is shared noise")
                    ->capture_default_str(),
                "noise", synth.cfg.noise_rate);
    merge.watch(synth_cmd->add_option("--seed", synth.cfg.seed, "generator seed")
                    ->capture_default_str(),
                "seed", synth.cfg.seed);

    InspectArgs inspect;
    CLI::App* inspect_cmd =
        data->add_subcommand("inspect", "summarize a dataset file");
    inspect_cmd->fallthrough();
    inspect_cmd->add_option("--data", inspect.data, "dataset file")->required();
    merge.watch(inspect_cmd->add_option("--format", inspect.format,
                                        "csv, jsonl or auto")->capture_default_str(),
                "format", inspect.format);
    inspect_cmd->add_flag("--json", inspect.as_json, "machine-readable output");

    TrainArgs train;
    CLI::App* train_cmd =
        app.add_subcommand("train", "fit a pipeline and write a model file");
    train_cmd->fallthrough();
    train_cmd->add_option("--data", train.data, "labeled dataset")->required();
    train_cmd->add_option("--out", train.out, "model file to write")->required();
    merge.watch(train_cmd->add_option("--format", train.format, "csv, jsonl or auto")
                    ->capture_default_str(),
                "format", train.format);
    merge.watch(train_cmd->add_option("--rep", train.rep, "tfidf or doc2vec")
                    ->capture_default_str(),
                "rep", train.rep);
    merge.watch(train_cmd->add_option("--seed", train.seed, "training seed")
                    ->capture_default_str(),
                "seed", train.seed);
    merge.watch(train_cmd
                    ->add_option("--top-labels", train.top_labels,
                                 "keep only the k most frequent labels; 0 keeps all")
                    ->capture_default_str(),
                "top_labels", train.top_labels);
    train_cmd->add_flag("--json", train.as_json, "machine-readable output");
    add_feature_flags(train_cmd, merge, train.features);
    add_classifier_flags(train_cmd, merge, train.clf);

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand(
        "benchmark", "cross-validate every representation and classifier");
    bench_cmd->fallthrough();
    bench_cmd->add_option("--data", bench.data, "labeled dataset")->required();
    bench_cmd->add_option("--out", bench.out, "report directory")->required();
    merge.watch(bench_cmd->add_option("--format", bench.format, "csv, jsonl or auto")
                    ->capture_default_str(),
                "format", bench.format);
    merge.watch(bench_cmd->add_option("--folds", bench.folds, "cross-validation folds")
                    ->capture_default_str(),
                "folds", bench.folds);
    merge.watch(bench_cmd->add_option("--seed", bench.seed, "shuffle and training seed")
                    ->capture_default_str(),
                "seed", bench.seed);
    merge.watch(bench_cmd
                    ->add_option("--top-labels", bench.top_labels,
                                 "keep only the k most frequent labels; 0 keeps all")
                    ->capture_default_str(),
                "top_labels", bench.top_labels);
    bench_cmd->add_flag("--json", bench.as_json, "machine-readable output");
    add_feature_flags(bench_cmd, merge, bench.features);

    PredictArgs predict;
    CLI::App* predict_cmd =
        app.add_subcommand("predict", "classify one description with a saved model");
    predict_cmd->fallthrough();
    CLI::Option* model_opt =
        predict_cmd->add_option("--model", predict.model, "model file")
            ->envname("SOCMAP_MODEL");
    merge.watch(model_opt, "model", predict.model);
    CLI::Option* text_opt = predict_cmd->add_option(
        "--text", predict.text, "description text; stdin is read when omitted");
    predict_cmd->add_flag("--json", predict.as_json, "machine-readable output");

    ServeArgs serve;
    CLI::App* serve_cmd =
        app.add_subcommand("serve", "serve predictions over HTTP");
    serve_cmd->fallthrough();
    CLI::Option* serve_model =
        serve_cmd->add_option("--model", serve.model, "model file")
            ->envname("SOCMAP_MODEL");
    merge.watch(serve_model, "model", serve.model);
    CLI::Option* host_opt = serve_cmd->add_option("--host", serve.cfg.host, "bind host")
                                ->envname("SOCMAP_HOST")
                                ->capture_default_str();
    merge.watch(host_opt, "host", serve.cfg.host);
    CLI::Option* port_opt =
        serve_cmd->add_option("--port", serve.cfg.port, "bind port; 0 picks one")
            ->envname("SOCMAP_PORT")
            ->capture_default_str();
    merge.watch(port_opt, "port", serve.cfg.port);
    merge.watch(serve_cmd
                    ->add_option("--max-body", serve.cfg.max_body_bytes,
                                 "request body limit in bytes")
                    ->capture_default_str(),
                "max_body", serve.cfg.max_body_bytes);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return int(ErrorKind::usage);
    }

    try {
        if (!config_path.empty()) merge.apply(load_config(config_path));
        predict.text_given = text_opt->count() > 0;

        if (synth_cmd->parsed())
            run_synth(synth);
        else if (inspect_cmd->parsed())
            run_inspect(inspect);
        else if (train_cmd->parsed())
            run_train(train);
        else if (bench_cmd->parsed())
            run_benchmark(bench);
        else if (predict_cmd->parsed())
            run_predict(predict);
        else if (serve_cmd->parsed())
            run_serve(serve);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return int(ErrorKind::internal);
    }
}
