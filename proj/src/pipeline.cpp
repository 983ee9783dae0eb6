#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>

#include "json.hpp"
#include "socmap/classifier_io.hpp"
#include "socmap/error.hpp"
#include "socmap/pipeline.hpp"

namespace socmap {

namespace {

constexpr char kMagic[8] = {'S', 'O', 'C', 'P', 'I', 'P', 'E', '1'};
constexpr uint32_t kFormatVersion = 1;

uint64_t fnv1a(uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    h ^= 0xff;
    h *= 0x100000001b3ull;
    return h;
}

int64_t creation_time() {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') return int64_t(v);
    }
    return int64_t(std::time(nullptr));
}

std::string version_digest(Representation rep, Algorithm algo,
                           const std::string& fingerprint,
                           const std::vector<std::string>& labels, uint32_t dim) {
    uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, representation_name(rep));
    h = fnv1a(h, algorithm_name(algo));
    h = fnv1a(h, fingerprint);
    for (const std::string& l : labels) h = fnv1a(h, l);
    h = fnv1a(h, std::to_string(dim));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s-%s-%016llx",
                  representation_name(rep).c_str(), algorithm_name(algo).c_str(),
                  static_cast<unsigned long long>(h));
    return buf;
}

struct PayloadEntry {
    std::string name;
    uint64_t offset = 0;
    uint64_t size = 0;
    uint32_t checksum = 0;
};

} // namespace

Pipeline Pipeline::train(const Dataset& data, Representation rep,
                         const ClassifierSpec& spec, const VectorizerConfig& tf_cfg,
                         const EmbedConfig& em_cfg) {
    if (data.empty()) throw DataError("cannot train a pipeline on an empty dataset");

    Pipeline p;
    p.rep_ = rep;
    p.labels_ = LabelMap::from_dataset(data);

    std::vector<uint32_t> y(data.size());
    for (size_t i = 0; i < data.size(); ++i)
        y[i] = p.labels_.index_of(data.record(i).soc_code);

    FeatureMatrix X;
    if (rep == Representation::tfidf) {
        p.tfidf_ = tfidf_fit(data, tf_cfg);
        std::vector<SparseVector> rows;
        rows.reserve(data.size());
        for (const Record& r : data.records())
            rows.push_back(tfidf_transform(*p.tfidf_, r.job_description));
        X = FeatureMatrix::from_sparse(std::move(rows), p.tfidf_->dim());
    } else {
        std::vector<std::string> texts;
        texts.reserve(data.size());
        for (const Record& r : data.records()) texts.push_back(r.job_description);
        p.embedder_ = DocEmbedder::fit(texts, em_cfg);
        std::vector<DenseVector> rows;
        rows.reserve(data.size());
        for (size_t i = 0; i < data.size(); ++i)
            rows.push_back(dense_from_f32(p.embedder_->doc_vector(i)));
        X = FeatureMatrix::from_dense(std::move(rows), p.embedder_->dim());
    }

    p.clf_ = fit_classifier(spec, X, y);

    char fp[32];
    std::snprintf(fp, sizeof(fp), "%016llx",
                  static_cast<unsigned long long>(data.content_hash()));
    p.meta_.dataset_fingerprint = fp;
    p.meta_.training_rows = data.size();
    p.meta_.feature_dim = uint32_t(X.dim());
    p.meta_.class_count = p.labels_.size();
    p.meta_.created_unix = creation_time();
    p.meta_.model_version = version_digest(rep, spec.algorithm,
                                           p.meta_.dataset_fingerprint,
                                           p.labels_.labels(), p.meta_.feature_dim);
    return p;
}

std::string Pipeline::predict_one(const std::string& description) const {
    uint32_t idx;
    if (rep_ == Representation::tfidf) {
        SparseVector v = tfidf_transform(*tfidf_, description);
        idx = predict(*clf_, VectorView::of(v));
    } else {
        std::vector<float> v = embedder_->infer(description);
        DenseVector d = dense_from_f32(v);
        idx = predict(*clf_, VectorView::of(d));
    }
    return labels_.label_of(idx);
}

void Pipeline::save(const std::string& path) const {
    std::vector<uint8_t> vec_payload;
    if (rep_ == Representation::tfidf) {
        std::string text = tfidf_to_json(*tfidf_);
        vec_payload.assign(text.begin(), text.end());
    } else {
        BinaryWriter w;
        embedder_->save(w);
        vec_payload = w.take();
    }
    BinaryWriter cw;
    write_classifier(cw, *clf_);
    std::vector<uint8_t> clf_payload = cw.take();

    nlohmann::json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["representation"] = representation_name(rep_);
    manifest["algorithm"] = algorithm_name(algorithm());
    manifest["labels"] = labels_.labels();
    manifest["metadata"] = {{"model_version", meta_.model_version},
                            {"dataset_fingerprint", meta_.dataset_fingerprint},
                            {"training_rows", meta_.training_rows},
                            {"feature_dim", meta_.feature_dim},
                            {"class_count", meta_.class_count},
                            {"created_unix", meta_.created_unix}};
    manifest["payloads"] = nlohmann::json::array();
    const std::pair<const char*, const std::vector<uint8_t>*> parts[] = {
        {"vectorizer", &vec_payload}, {"classifier", &clf_payload}};
    uint64_t offset = 0;
    for (const auto& [name, bytes] : parts) {
        manifest["payloads"].push_back(
            {{"name", name},
             {"offset", offset},
             {"size", bytes->size()},
             {"crc32", crc32(bytes->data(), bytes->size())}});
        offset += bytes->size();
    }
    std::string mtext = manifest.dump();

    BinaryWriter out;
    out.raw(kMagic, sizeof(kMagic));
    out.u64(mtext.size());
    out.raw(mtext.data(), mtext.size());
    out.raw(vec_payload.data(), vec_payload.size());
    out.raw(clf_payload.data(), clf_payload.size());
    write_file_bytes(path, out.bytes());
}

Pipeline Pipeline::load(const std::string& path) {
    std::vector<uint8_t> bytes = read_file_bytes(path);
    if (bytes.size() < sizeof(kMagic) + 8 ||
        std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw IoError(path + ": not a pipeline file");

    uint64_t msize;
    std::memcpy(&msize, bytes.data() + sizeof(kMagic), 8);
    size_t header = sizeof(kMagic) + 8;
    if (msize > bytes.size() - header)
        throw IoError(path + ": pipeline manifest is truncated");
    const uint8_t* region = bytes.data() + header + msize;
    const size_t region_size = bytes.size() - header - size_t(msize);

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(bytes.begin() + long(header),
                                         bytes.begin() + long(header + msize));
    } catch (const nlohmann::json::exception& ex) {
        throw IoError(path + ": pipeline manifest is not valid JSON: " + ex.what());
    }

    try {
        uint64_t version = manifest.at("format_version").get<uint64_t>();
        if (version > kFormatVersion)
            throw IoError(path + ": pipeline format version " +
                          std::to_string(version) +
                          " is newer than this build supports (" +
                          std::to_string(kFormatVersion) + ")");

        Pipeline p;
        p.rep_ = parse_representation(manifest.at("representation").get<std::string>());
        Algorithm algo = parse_algorithm(manifest.at("algorithm").get<std::string>());
        p.labels_ = LabelMap(manifest.at("labels").get<std::vector<std::string>>());
        if (p.labels_.size() == 0)
            throw IoError(path + ": pipeline manifest has an empty label set");

        const nlohmann::json& md = manifest.at("metadata");
        p.meta_.model_version = md.at("model_version").get<std::string>();
        p.meta_.dataset_fingerprint = md.value("dataset_fingerprint", std::string());
        p.meta_.training_rows = md.value("training_rows", uint64_t{0});
        p.meta_.feature_dim = md.value("feature_dim", uint32_t{0});
        p.meta_.class_count = md.value("class_count", p.labels_.size());
        p.meta_.created_unix = md.value("created_unix", int64_t{0});

        std::vector<PayloadEntry> entries;
        for (const nlohmann::json& jp : manifest.at("payloads")) {
            PayloadEntry e;
            e.name = jp.at("name").get<std::string>();
            e.offset = jp.at("offset").get<uint64_t>();
            e.size = jp.at("size").get<uint64_t>();
            e.checksum = jp.at("crc32").get<uint32_t>();
            entries.push_back(std::move(e));
        }
        auto payload = [&](const char* name) -> std::pair<const uint8_t*, size_t> {
            for (const PayloadEntry& e : entries) {
                if (e.name != name) continue;
                if (e.offset > region_size || e.size > region_size - e.offset)
                    throw IoError(path + ": pipeline payload \"" + name +
                                  "\" is truncated");
                const uint8_t* start = region + e.offset;
                if (crc32(start, size_t(e.size)) != e.checksum)
                    throw IoError(path + ": pipeline payload \"" + name +
                                  "\" failed its checksum");
                return {start, size_t(e.size)};
            }
            throw IoError(path + ": pipeline payload \"" + std::string(name) +
                          "\" is missing from the manifest");
        };

        auto [vp, vn] = payload("vectorizer");
        if (p.rep_ == Representation::tfidf) {
            p.tfidf_ = tfidf_from_json(std::string(vp, vp + vn));
        } else {
            BinaryReader r(vp, vn);
            p.embedder_ = DocEmbedder::load(r);
        }

        auto [cp, cn] = payload("classifier");
        BinaryReader cr(cp, cn);
        p.clf_ = read_classifier(cr);

        if (algorithm_of(*p.clf_) != algo)
            throw IoError(path + ": manifest algorithm does not match the payload");
        if (class_count_of(*p.clf_) != p.labels_.size())
            throw IoError(path + ": classifier class count does not match the labels");
        uint32_t vec_dim = p.rep_ == Representation::tfidf ? p.tfidf_->dim()
                                                           : p.embedder_->dim();
        if (dim_of(*p.clf_) != vec_dim)
            throw IoError(path + ": classifier dimension does not match the vectorizer");
        return p;
    } catch (const nlohmann::json::exception& ex) {
        throw IoError(path + ": pipeline manifest is malformed: " + ex.what());
    }
}

} // namespace socmap
