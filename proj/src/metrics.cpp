#include "socmap/metrics.hpp"

#include <vector>

#include "socmap/error.hpp"

namespace socmap {

namespace {

struct ClassCounts {
    std::vector<double> tp, fp, fn;
};

ClassCounts count_per_class(std::span<const uint32_t> y_true,
                            std::span<const uint32_t> y_pred, uint32_t class_count) {
    if (y_true.size() != y_pred.size())
        throw DataError("metrics: y_true and y_pred length mismatch");
    ClassCounts c;
    c.tp.assign(class_count, 0.0);
    c.fp.assign(class_count, 0.0);
    c.fn.assign(class_count, 0.0);
    for (size_t i = 0; i < y_true.size(); ++i) {
        uint32_t t = y_true[i], p = y_pred[i];
        if (t == p) {
            if (t < class_count) c.tp[t] += 1.0;
        } else {
            if (p < class_count) c.fp[p] += 1.0;
            if (t < class_count) c.fn[t] += 1.0;
        }
    }
    return c;
}

} // namespace

double accuracy(std::span<const uint32_t> y_true, std::span<const uint32_t> y_pred) {
    if (y_true.size() != y_pred.size())
        throw DataError("accuracy: length mismatch");
    if (y_true.empty())
        throw DataError("accuracy: empty input");
    size_t hits = 0;
    for (size_t i = 0; i < y_true.size(); ++i)
        if (y_true[i] == y_pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double macro_precision(std::span<const uint32_t> y_true,
                       std::span<const uint32_t> y_pred, uint32_t class_count) {
    if (class_count == 0)
        throw DataError("macro_precision: empty class set");
    ClassCounts c = count_per_class(y_true, y_pred, class_count);
    double sum = 0.0;
    for (uint32_t k = 0; k < class_count; ++k) {
        double denom = c.tp[k] + c.fp[k];
        if (denom > 0.0) sum += c.tp[k] / denom;
    }
    return sum / class_count;
}

double macro_recall(std::span<const uint32_t> y_true,
                    std::span<const uint32_t> y_pred, uint32_t class_count) {
    if (class_count == 0)
        throw DataError("macro_recall: empty class set");
    ClassCounts c = count_per_class(y_true, y_pred, class_count);
    double sum = 0.0;
    for (uint32_t k = 0; k < class_count; ++k) {
        double denom = c.tp[k] + c.fn[k];
        if (denom > 0.0) sum += c.tp[k] / denom;
    }
    return sum / class_count;
}

double macro_f1(std::span<const uint32_t> y_true,
                std::span<const uint32_t> y_pred, uint32_t class_count) {
    if (class_count == 0)
        throw DataError("macro_f1: empty class set");
    ClassCounts c = count_per_class(y_true, y_pred, class_count);
    double sum = 0.0;
    for (uint32_t k = 0; k < class_count; ++k) {
        double pd = c.tp[k] + c.fp[k];
        double rd = c.tp[k] + c.fn[k];
        double p = pd > 0.0 ? c.tp[k] / pd : 0.0;
        double r = rd > 0.0 ? c.tp[k] / rd : 0.0;
        if (p + r > 0.0) sum += 2.0 * p * r / (p + r);
    }
    return sum / class_count;
}

} // namespace socmap
