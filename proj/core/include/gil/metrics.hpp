#pragma once

#include <vector>

namespace gil::train {

/// Fraction of mask positions where pred matches labels.
double accuracy(const std::vector<int>& pred, const std::vector<int>& labels,
                const std::vector<int>& mask);

/// Binary F1 for positive class 1 over the masked nodes. Returns 0 when the
/// positive class never appears in predictions and labels produce no overlap.
double f1_binary(const std::vector<int>& pred, const std::vector<int>& labels,
                 const std::vector<int>& mask);

/// Mann-Whitney AUC: fraction of (pos, neg) score pairs with pos > neg,
/// ties counted 0.5.
double roc_auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

}  // namespace gil::train
