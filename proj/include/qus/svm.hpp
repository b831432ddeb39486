#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qus/ml.hpp"

namespace qus {

struct SvmParams {
    double c = 1.0;
    double gamma = 1.0;
    /// Stopping gap on the maximal violating pair; KKT residuals stay below it.
    double tolerance = 1e-4;
    std::size_t max_iterations = 1'000'000;
};

/// RBF soft-margin classifier, f(x) = sum_i coef_i K(sv_i, x) + bias with
/// coef_i = alpha_i y_i and K(u, v) = exp(-gamma |u - v|^2).
struct SvmModel {
    Matrix support_vectors;
    Vector dual_coef;
    double bias = 0.0;
    double gamma = 1.0;
    double c = 1.0;
    double w_norm = 0.0;
};

struct SvmFit {
    SvmModel model;
    Vector alpha;             // one multiplier per training row, in [0, C]
    Vector train_decision;    // f evaluated at every training row
    std::size_t iterations = 0;
    double final_gap = 0.0;
};

double rbf_kernel(const Vector& u, const Vector& v, double gamma);

/// Sequential minimal optimization with second-order working-set selection.
/// Index ties resolve to the lowest row, and the problem is solved with labels
/// oriented so the first row is +1, which makes a global label flip negate f
/// exactly.
SvmFit svm_train_detailed(const Matrix& x, std::span<const int> labels, const SvmParams& params);
SvmModel svm_train(const Matrix& x, std::span<const int> labels, const SvmParams& params);

double svm_decision(const SvmModel& model, const Vector& x);

struct SvmDistance {
    double value = 0.0;  // svm_sign * |f| / w_norm
    int sign = 1;        // +1 when f >= 0
};

SvmDistance svm_distance(const SvmModel& model, const Vector& x);

}  // namespace qus
