#include "gil/metrics.hpp"

#include "gil/error.hpp"

namespace gil::train {

double accuracy(const std::vector<int>& pred, const std::vector<int>& labels,
                const std::vector<int>& mask) {
    require(!mask.empty(), "accuracy: empty mask");
    long long hit = 0;
    for (int i : mask) {
        require(i >= 0 && i < static_cast<int>(pred.size()) && i < static_cast<int>(labels.size()),
                "accuracy: mask index out of range");
        if (pred[static_cast<size_t>(i)] == labels[static_cast<size_t>(i)]) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(mask.size());
}

double f1_binary(const std::vector<int>& pred, const std::vector<int>& labels,
                 const std::vector<int>& mask) {
    require(!mask.empty(), "f1_binary: empty mask");
    long long tp = 0, fp = 0, fn = 0;
    for (int i : mask) {
        const int p = pred[static_cast<size_t>(i)];
        const int l = labels[static_cast<size_t>(i)];
        if (p == 1 && l == 1) ++tp;
        if (p == 1 && l != 1) ++fp;
        if (p != 1 && l == 1) ++fn;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

double roc_auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    require(!pos_scores.empty() && !neg_scores.empty(), "roc_auc: empty score set");
    double wins = 0.0;
    for (double p : pos_scores)
        for (double n : neg_scores) {
            if (p > n)
                wins += 1.0;
            else if (p == n)
                wins += 0.5;
        }
    return wins / (static_cast<double>(pos_scores.size()) * static_cast<double>(neg_scores.size()));
}

}  // namespace gil::train
