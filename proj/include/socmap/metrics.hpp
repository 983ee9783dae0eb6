#ifndef SOCMAP_METRICS_HPP
#define SOCMAP_METRICS_HPP

#include <cstdint>
#include <span>

namespace socmap {

// Classification metrics over dense label indices. `class_count` fixes the
// set of classes the macro averages run over (0..class_count-1); classes
// with an undefined score (zero predicted positives for precision, zero
// true members for recall, P+R = 0 for F1) contribute 0 to the mean.

double accuracy(std::span<const uint32_t> y_true, std::span<const uint32_t> y_pred);

double macro_precision(std::span<const uint32_t> y_true,
                       std::span<const uint32_t> y_pred, uint32_t class_count);

double macro_recall(std::span<const uint32_t> y_true,
                    std::span<const uint32_t> y_pred, uint32_t class_count);

double macro_f1(std::span<const uint32_t> y_true,
                std::span<const uint32_t> y_pred, uint32_t class_count);

} // namespace socmap

#endif
