#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tfed::metrics {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    std::size_t num_classes = 0;
    std::vector<std::uint64_t> counts;  // c * c, row-major

    std::uint64_t at(std::size_t truth, std::size_t pred) const {
        return counts[truth * num_classes + pred];
    }
    std::uint64_t total() const;
};

ConfusionMatrix confusion(const std::vector<int>& preds,
                          const std::vector<int>& labels, std::size_t num_classes);

enum class Averaging { Macro, Weighted };

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Per-class precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2PR/(P+R),
/// with 0/0 defined as 0. Macro averages classes uniformly; Weighted by
/// support. Zero-support classes contribute 0 under Macro.
Prf precision_recall_f1(const ConfusionMatrix& cm, Averaging averaging = Averaging::Macro);

}  // namespace tfed::metrics
