#include "socmap/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "socmap/error.hpp"
#include "socmap/rng.hpp"

namespace socmap {

namespace {

constexpr uint64_t kFnvOffset = 0xCBF29CE484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001B3ull;

uint64_t fnv1a(uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    h ^= 0xFF; // field separator
    h *= kFnvPrime;
    return h;
}

const std::vector<std::string> kColumns = {
    "job_title", "job_description", "company_name", "soc_code", "soc_occupation"};

// Splits one logical CSV record starting at `pos`. Returns false at EOF.
// Handles quoted fields with embedded commas, newlines and "" escapes.
bool next_csv_record(const std::string& text, size_t& pos,
                     std::vector<std::string>& fields, size_t record_no) {
    fields.clear();
    if (pos >= text.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                field.push_back(c);
                ++pos;
            }
        } else if (c == '"') {
            if (!field.empty())
                throw DataError("CSV row " + std::to_string(record_no) +
                                ": quote inside unquoted field");
            in_quotes = true;
            saw_any = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            saw_any = true;
            ++pos;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')
                ++pos;
            ++pos;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
            saw_any = true;
            ++pos;
        }
    }
    if (in_quotes)
        throw DataError("CSV row " + std::to_string(record_no) +
                        ": unterminated quoted field");
    if (!saw_any && fields.empty()) return false;
    fields.push_back(std::move(field));
    return true;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

Dataset load_csv(const std::string& path, LoadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open dataset file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();

    size_t pos = 0;
    std::vector<std::string> fields;
    if (!next_csv_record(text, pos, fields, 0))
        throw DataError("CSV file is empty (header row required): " + path);

    std::map<std::string, size_t> col;
    for (size_t i = 0; i < fields.size(); ++i) col[trim_copy(fields[i])] = i;
    for (const char* required : {"job_description", "soc_code"})
        if (!col.count(required))
            throw DataError("CSV is missing required column '" +
                            std::string(required) + "': " + path);

    auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::string {
        auto it = col.find(name);
        if (it == col.end() || it->second >= row.size()) return "";
        return row[it->second];
    };

    std::vector<Record> records;
    LoadStats local;
    size_t record_no = 1;
    while (next_csv_record(text, pos, fields, record_no)) {
        if (fields.size() != col.size())
            throw DataError("CSV row " + std::to_string(record_no) + ": expected " +
                            std::to_string(col.size()) + " fields, got " +
                            std::to_string(fields.size()));
        ++local.rows_seen;
        Record r;
        r.job_title = cell(fields, "job_title");
        r.job_description = cell(fields, "job_description");
        r.company_name = cell(fields, "company_name");
        r.soc_code = cell(fields, "soc_code");
        r.soc_occupation = cell(fields, "soc_occupation");
        if (trim_copy(r.job_description).empty() || trim_copy(r.soc_code).empty())
            ++local.rows_dropped;
        else
            records.push_back(std::move(r));
        ++record_no;
    }
    if (stats) *stats = local;
    return Dataset(std::move(records));
}

Dataset load_jsonl(const std::string& path, LoadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open dataset file: " + path);
    std::vector<Record> records;
    LoadStats local;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("JSONL row " + std::to_string(line_no) +
                            ": invalid JSON (" + e.what() + ")");
        }
        if (!obj.is_object())
            throw DataError("JSONL row " + std::to_string(line_no) + ": not an object");
        auto field = [&](const char* key) -> std::string {
            auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) return "";
            if (!it->is_string())
                throw DataError("JSONL row " + std::to_string(line_no) + ": field '" +
                                key + "' is not a string");
            return it->get<std::string>();
        };
        ++local.rows_seen;
        Record r;
        r.job_title = field("job_title");
        r.job_description = field("job_description");
        r.company_name = field("company_name");
        r.soc_code = field("soc_code");
        r.soc_occupation = field("soc_occupation");
        if (trim_copy(r.job_description).empty() || trim_copy(r.soc_code).empty())
            ++local.rows_dropped;
        else
            records.push_back(std::move(r));
    }
    if (stats) *stats = local;
    return Dataset(std::move(records));
}

} // namespace

std::string trim_copy(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

Dataset::Dataset(std::vector<Record> records) : records_(std::move(records)) {
    std::set<std::string> labels;
    for (const auto& r : records_) labels.insert(r.soc_code);
    labels_.assign(labels.begin(), labels.end());
}

std::map<std::string, size_t> Dataset::label_counts() const {
    std::map<std::string, size_t> counts;
    for (const auto& r : records_) ++counts[r.soc_code];
    return counts;
}

uint64_t Dataset::content_hash() const {
    uint64_t h = kFnvOffset;
    for (const auto& r : records_) {
        h = fnv1a(h, r.job_title);
        h = fnv1a(h, r.job_description);
        h = fnv1a(h, r.company_name);
        h = fnv1a(h, r.soc_code);
        h = fnv1a(h, r.soc_occupation);
    }
    return h;
}

LabelMap::LabelMap(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (uint32_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i], i).second)
            throw DataError("LabelMap: duplicate label '" + labels_[i] + "'");
    }
}

LabelMap LabelMap::from_dataset(const Dataset& d) {
    return LabelMap(d.labels());
}

uint32_t LabelMap::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end())
        throw DataError("LabelMap: unknown label '" + label + "'");
    return it->second;
}

bool LabelMap::contains(const std::string& label) const {
    return index_.count(label) != 0;
}

const std::string& LabelMap::label_of(uint32_t index) const {
    if (index >= labels_.size())
        throw DataError("LabelMap: index out of range");
    return labels_[index];
}

DataFormat parse_data_format(const std::string& name) {
    if (name == "csv") return DataFormat::csv;
    if (name == "jsonl") return DataFormat::jsonl;
    throw UsageError("unknown data format '" + name + "' (expected csv or jsonl)");
}

DataFormat guess_data_format(const std::string& path) {
    auto ends_with = [&](const char* suf) {
        std::string s(suf);
        return path.size() >= s.size() &&
               path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".jsonl") || ends_with(".ndjson")) return DataFormat::jsonl;
    return DataFormat::csv;
}

Dataset load_dataset(const std::string& path, DataFormat format, LoadStats* stats) {
    return format == DataFormat::csv ? load_csv(path, stats) : load_jsonl(path, stats);
}

void save_dataset(const Dataset& d, const std::string& path, DataFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open file for writing: " + path);
    if (format == DataFormat::csv) {
        out << "job_title,job_description,company_name,soc_code,soc_occupation\n";
        for (const auto& r : d.records()) {
            out << csv_escape(r.job_title) << ',' << csv_escape(r.job_description)
                << ',' << csv_escape(r.company_name) << ',' << csv_escape(r.soc_code)
                << ',' << csv_escape(r.soc_occupation) << '\n';
        }
    } else {
        for (const auto& r : d.records()) {
            nlohmann::json obj{{"job_title", r.job_title},
                               {"job_description", r.job_description},
                               {"company_name", r.company_name},
                               {"soc_code", r.soc_code},
                               {"soc_occupation", r.soc_occupation}};
            out << obj.dump() << '\n';
        }
    }
    if (!out)
        throw IoError("failed writing file: " + path);
}

Dataset filter_top_k_labels(const Dataset& d, size_t k) {
    if (k == 0)
        throw UsageError("filter_top_k_labels: k must be positive");
    auto counts = d.label_counts();
    if (k >= counts.size()) return d;
    // Sort by descending count, lexicographic label on ties.
    std::vector<std::pair<std::string, size_t>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::set<std::string> keep;
    for (size_t i = 0; i < k; ++i) keep.insert(order[i].first);
    std::vector<Record> records;
    for (const auto& r : d.records())
        if (keep.count(r.soc_code)) records.push_back(r);
    return Dataset(std::move(records));
}

std::vector<FoldSplit> kfold_split(const Dataset& d, const CvConfig& cfg) {
    size_t n = d.size();
    if (cfg.fold_count < 2)
        throw UsageError("kfold_split: fold_count must be at least 2");
    if (cfg.fold_count > n)
        throw DataError("kfold_split: fold_count " + std::to_string(cfg.fold_count) +
                        " exceeds dataset size " + std::to_string(n));

    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 rng(cfg.shuffle_seed);
    fisher_yates_shuffle(perm, rng);

    size_t k = cfg.fold_count;
    size_t base = n / k, extra = n % k;
    std::vector<FoldSplit> folds(k);
    size_t start = 0;
    for (size_t f = 0; f < k; ++f) {
        size_t len = base + (f < extra ? 1 : 0);
        auto& fold = folds[f];
        fold.test_indices.assign(perm.begin() + start, perm.begin() + start + len);
        fold.train_indices.reserve(n - len);
        fold.train_indices.insert(fold.train_indices.end(), perm.begin(),
                                  perm.begin() + start);
        fold.train_indices.insert(fold.train_indices.end(), perm.begin() + start + len,
                                  perm.end());
        start += len;
    }
    return folds;
}

Dataset generate_synthetic(const SynthConfig& cfg) {
    if (cfg.class_count == 0 || cfg.docs_per_class == 0 || cfg.vocab_per_class == 0)
        throw UsageError("generate_synthetic: counts must be positive");
    if (cfg.noise_rate < 0.0 || cfg.noise_rate > 1.0)
        throw UsageError("generate_synthetic: noise_rate must be in [0, 1]");

    constexpr uint32_t kNoiseVocab = 200;
    constexpr uint32_t kMinTokens = 30;
    constexpr uint32_t kMaxTokens = 80;

    std::mt19937_64 rng(cfg.seed);
    std::vector<Record> records;
    records.reserve(static_cast<size_t>(cfg.class_count) * cfg.docs_per_class);

    char buf[32];
    for (uint32_t c = 0; c < cfg.class_count; ++c) {
        std::snprintf(buf, sizeof(buf), "%02u-%04u", 11 + c, 1010 + c);
        std::string label = buf;
        for (uint32_t i = 0; i < cfg.docs_per_class; ++i) {
            uint32_t len =
                kMinTokens + static_cast<uint32_t>(bounded(rng, kMaxTokens - kMinTokens + 1));
            std::string text;
            for (uint32_t t = 0; t < len; ++t) {
                if (t > 0) text.push_back(' ');
                if (uniform01(rng) < cfg.noise_rate) {
                    text += "noise" + std::to_string(bounded(rng, kNoiseVocab));
                } else {
                    text += "kw" + std::to_string(c) + "x" +
                            std::to_string(bounded(rng, cfg.vocab_per_class));
                }
            }
            Record r;
            r.job_title = "role-" + label;
            r.job_description = std::move(text);
            r.company_name = "synthco";
            r.soc_code = label;
            r.soc_occupation = "synthetic occupation " + std::to_string(c);
            records.push_back(std::move(r));
        }
    }
    return Dataset(std::move(records));
}

} // namespace socmap
