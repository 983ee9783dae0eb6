#ifndef SOCMAP_CORPUS_HPP
#define SOCMAP_CORPUS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace socmap {

// One labeled job-description row. Only job_description and soc_code are
// required; title, company and occupation moniker are carried for
// traceability and never used as features.
struct Record {
    std::string job_title;
    std::string job_description;
    std::string company_name;
    std::string soc_code;
    std::string soc_occupation;
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Record> records);

    const std::vector<Record>& records() const { return records_; }
    const Record& record(size_t i) const { return records_[i]; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    // Distinct soc_code values, lexicographically sorted.
    const std::vector<std::string>& labels() const { return labels_; }
    std::map<std::string, size_t> label_counts() const;

    // FNV-1a over all record fields; used for report fingerprints.
    uint64_t content_hash() const;

private:
    std::vector<Record> records_;
    std::vector<std::string> labels_;
};

// Bijection between label text and dense indices 0..C-1.
class LabelMap {
public:
    LabelMap() = default;
    // Labels are indexed in the order given (must be distinct).
    explicit LabelMap(std::vector<std::string> labels);

    static LabelMap from_dataset(const Dataset& d); // lexicographic order

    uint32_t index_of(const std::string& label) const; // throws DataError if absent
    bool contains(const std::string& label) const;
    const std::string& label_of(uint32_t index) const;
    uint32_t size() const { return static_cast<uint32_t>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
    std::map<std::string, uint32_t> index_;
};

struct CvConfig {
    uint32_t fold_count = 10;
    uint64_t shuffle_seed = 0;
};

enum class DataFormat { csv, jsonl };

DataFormat parse_data_format(const std::string& name);
// Picks by file extension (.jsonl/.ndjson -> jsonl, otherwise csv).
DataFormat guess_data_format(const std::string& path);

struct LoadStats {
    size_t rows_seen = 0;
    size_t rows_dropped = 0; // empty description or soc code
};

// Reads a CSV (comma, double-quote escaping, UTF-8, header row) or JSONL
// file. Rows whose description or soc_code is empty after trimming are
// dropped and counted in `stats`. Throws IoError for unreadable files and
// DataError for missing columns or malformed rows (with the row number).
Dataset load_dataset(const std::string& path, DataFormat format,
                     LoadStats* stats = nullptr);

void save_dataset(const Dataset& d, const std::string& path, DataFormat format);

// Keeps records of the k most frequent labels (count ties broken by
// lexicographic label order), preserving record order.
Dataset filter_top_k_labels(const Dataset& d, size_t k);

struct FoldSplit {
    std::vector<size_t> train_indices;
    std::vector<size_t> test_indices;
};

// Shuffles indices once with cfg.shuffle_seed, then cuts contiguous slices.
// Test slices are disjoint, cover all indices, and differ in size by at
// most one; no stratification.
std::vector<FoldSplit> kfold_split(const Dataset& d, const CvConfig& cfg);

struct SynthConfig {
    uint32_t class_count = 5;
    uint32_t docs_per_class = 400;
    uint32_t vocab_per_class = 50;
    double noise_rate = 0.2;
    uint64_t seed = 1;
};

// Deterministic synthetic corpus: each class owns a disjoint keyword
// vocabulary; each document is a bag of 30-80 tokens, a noise_rate
// fraction drawn from a shared noise vocabulary.
Dataset generate_synthetic(const SynthConfig& cfg);

std::string trim_copy(const std::string& s);

} // namespace socmap

#endif
