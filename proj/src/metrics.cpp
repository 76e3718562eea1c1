#include "tfed/metrics.hpp"

#include <stdexcept>

namespace tfed::metrics {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts) t += c;
    return t;
}

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          std::size_t num_classes) {
    if (preds.size() != labels.size())
        throw std::invalid_argument("preds and labels must have equal length");
    ConfusionMatrix cm;
    cm.num_classes = num_classes;
    cm.counts.assign(num_classes * num_classes, 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int t = labels[i];
        const int p = preds[i];
        if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= num_classes ||
            static_cast<std::size_t>(p) >= num_classes)
            throw std::invalid_argument("class id out of range");
        ++cm.counts[static_cast<std::size_t>(t) * num_classes + static_cast<std::size_t>(p)];
    }
    return cm;
}

Prf precision_recall_f1(const ConfusionMatrix& cm, Averaging averaging) {
    const std::size_t c = cm.num_classes;
    if (cm.total() == 0) throw std::invalid_argument("confusion matrix is empty");

    double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0, weight_total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        std::uint64_t tp = cm.at(k, k), fp = 0, fn = 0;
        for (std::size_t j = 0; j < c; ++j) {
            if (j == k) continue;
            fp += cm.at(j, k);
            fn += cm.at(k, j);
        }
        const double p = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double r = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        const double f = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
        const double w = (averaging == Averaging::Weighted)
                             ? static_cast<double>(tp + fn)  // class support
                             : 1.0;
        sum_p += w * p;
        sum_r += w * r;
        sum_f += w * f;
        weight_total += w;
    }
    if (weight_total == 0.0) return {};
    return {sum_p / weight_total, sum_r / weight_total, sum_f / weight_total};
}

}  // namespace tfed::metrics
