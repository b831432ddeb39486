#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qus/ml.hpp"
#include "qus/svm.hpp"

namespace qus {

struct TuneOptions {
    std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
    std::vector<double> gamma_grid{0.01, 0.1, 1.0, 10.0};
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

struct GridPoint {
    double c = 0.0;
    double gamma = 0.0;
    double mean_accuracy = 0.0;
    double std_error = 0.0;
    bool failed = false;
};

struct TuneResult {
    double c = 0.0;
    double gamma = 0.0;
    std::size_t folds_used = 0;
    std::vector<GridPoint> grid;  // gamma-major, both grids in ascending order
    std::vector<std::string> warnings;
};

/// Stratified k-fold accuracy per grid point on standardized rows. Among points
/// within one standard error of the best mean, the smallest gamma wins, then
/// the smallest C. Folds shrink to the smaller class size when needed.
TuneResult tune_hyperparams(const Matrix& x, std::span<const int> labels, const TuneOptions& options);

/// Fold assignment (0..folds-1) per row, stratified by label.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

/// Training-set scores of `scorer` fitted on already standardized rows.
std::vector<double> fit_and_score(const Matrix& x_std, std::span<const int> labels, Scorer scorer,
                                  const SvmParams& svm);

struct SubsetScore {
    std::vector<std::size_t> columns;
    double auc = 0.0;
};

struct SelectionResult {
    std::vector<std::size_t> best;  // ascending column indices into the table
    double best_auc = 0.0;
    std::size_t n_enumerated = 0;
    std::size_t n_skipped = 0;
    std::vector<SubsetScore> scored;  // in enumeration (bitmask) order, skipped subsets omitted
    std::vector<std::string> warnings;
};

struct SelectOptions {
    Scorer scorer = Scorer::svm_distance;
    /// gamma <= 0 means 1 / subset size.
    SvmParams svm{1.0, 0.0};
    std::size_t jobs = 1;
};

/// Exhaustive search over every non-empty subset of `candidates` (columns of
/// the raw table). Each subset is standardized, fused and scored by training
/// AUC. Ties go to fewer columns, then to the lexicographically smaller list.
SelectionResult select_features(const Matrix& table, std::span<const int> labels,
                                std::span<const std::size_t> candidates, const SelectOptions& options = {});

}  // namespace qus
