#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "landslide/common.hpp"

namespace landslide {

// Confusion counts with Landslide as the positive class.
struct ConfusionMatrix {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    int64_t total() const { return tp + fp + tn + fn; }
};

// predicted/truth hold class indices (1 = Landslide).
ConfusionMatrix confusion_from_pairs(const std::vector<int>& predicted,
                                     const std::vector<int>& truth);

struct EvalReport {
    double accuracy = 0.0;
    std::optional<double> precision;  // empty when tp+fp == 0
    std::optional<double> recall;     // empty when tp+fn == 0
    ConfusionMatrix confusion;
    std::vector<double> loss_curve;
};

// accuracy = (TP+TN)/total, precision = TP/(TP+FP), recall = TP/(TP+FN);
// zero denominators yield the undefined marker.
EvalReport report_from_confusion(const ConfusionMatrix& cm);

std::string report_to_json(const EvalReport& r, const std::string& name = "");
EvalReport report_from_json(const std::string& text, std::string* name = nullptr);

// Aligned plain-text table: Dataset | Accuracy(%) | Precision(%) | Recall(%).
std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace landslide
