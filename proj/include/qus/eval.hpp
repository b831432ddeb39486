#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qus {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  // from (0,0) to (1,1)
    double auc = 0.0;
};

/// Labels are -1/+1 with +1 (malignant) as the positive class. Tied scores
/// move the curve diagonally, so the trapezoid area equals the Mann-Whitney
/// statistic with ties counted as 1/2.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct BinaryMetrics {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

/// Predicts malignant when score >= threshold.
BinaryMetrics operating_metrics(std::span<const double> scores, std::span<const int> labels, double threshold);

/// Threshold maximizing TPR - FPR over the training scores, placed midway
/// between the chosen score and the next lower distinct score. Ties in the
/// index resolve toward the higher threshold.
double youden_threshold(std::span<const double> scores, std::span<const int> labels);

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> values);

/// Pearson correlation of mid-ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct SplitPlan {
    std::size_t repeats = 5;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> train;  // sorted row indices per repeat
    std::vector<std::vector<std::size_t>> test;
};

/// Stratified shuffle splits; each class contributes round(fraction * count)
/// rows to training, keeping at least one row of each class on both sides.
SplitPlan make_splits(std::span<const int> labels, std::size_t repeats = 5, double train_fraction = 0.7,
                      std::uint64_t seed = 0);

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // population STD over repeats
};

MetricSummary summarize(std::span<const double> values);

struct MetricRow {
    std::string scorer;
    std::string category_filter;
    double threshold_cm2 = 0.0;
    bool available = false;
    std::size_t n_lesions = 0;
    std::size_t n_repeats = 0;  // repeats whose kept test rows held both classes
    double n_train = 0.0;       // mean over usable repeats
    double n_test = 0.0;
    MetricSummary auc, accuracy, sensitivity, specificity;
};

std::vector<double> default_size_thresholds();

/// One repeat of a scorer: rows are indices into the lesion arrays and
/// `train_scores[i]` belongs to `train[i]`.
struct RepeatResult {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<double> train_scores;
    std::vector<double> test_scores;
};

/// Per threshold, keeps test lesions with area strictly above it and
/// recomputes AUC and metrics at the Youden threshold of that repeat's training
/// scores. Repeats whose kept test rows lack a class are skipped; a row with no
/// usable repeat is marked unavailable.
std::vector<MetricRow> size_threshold_sweep(std::span<const double> area_cm2, std::span<const int> labels,
                                            std::span<const RepeatResult> repeats,
                                            std::span<const double> thresholds, const std::string& scorer,
                                            const std::string& category_filter);

nlohmann::json report_to_json(std::span<const MetricRow> rows);
std::string report_to_csv(std::span<const MetricRow> rows);

}  // namespace qus
