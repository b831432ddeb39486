#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qus {

using Matrix = Eigen::MatrixXd;  // rows = samples, columns = features
using Vector = Eigen::VectorXd;

/// Class labels are -1 (benign) and +1 (malignant).
using Labels = std::vector<int>;

enum class Scorer { pc1, projection, svm_distance };

std::string_view to_string(Scorer scorer);
Scorer parse_scorer(std::string_view text);

/// Throws single_class unless both -1 and +1 occur and nothing else does.
void require_binary_labels(std::span<const int> labels);

struct Standardizer {
    Vector mean;
    Vector std;  // population standard deviation, strictly positive

    static Standardizer fit(const Matrix& x);
    Vector transform(const Vector& x) const;
    Matrix transform(const Matrix& x) const;
};

struct PcaModel {
    Vector mean;               // training mean of the (standardized) inputs
    Matrix loadings;           // d x k, orthonormal columns
    Vector eigenvalues;        // k, descending, strictly positive
    Vector explained_ratio;    // k, descending, sums to 1
    bool rank_deficient = false;

    std::size_t n_components() const { return static_cast<std::size_t>(loadings.cols()); }
};

/// Eigendecomposition of the sample covariance (n - 1 normalization). Each
/// component is oriented so the malignant training mean scores positive; when
/// labels are absent or the means tie, the largest-magnitude loading is made
/// positive (ties resolved toward the largest feature index).
PcaModel pca_fit(const Matrix& x, std::span<const int> labels = {});

double pc1_score(const PcaModel& model, const Vector& x);

/// Per-feature weights sum_k |loading_jk| * ratio_k, normalized to sum to 1.
Vector contributions(const PcaModel& model);

/// Unit vector along mean(malignant) - mean(benign).
Vector fit_reference(const Matrix& x, std::span<const int> labels);

double projection_score(const Vector& x, const Vector& reference);

/// Mean over samples of the given rows.
Vector column_mean(const Matrix& x, std::span<const std::size_t> rows);

/// Rows `rows` and columns `cols` of `x`.
Matrix take(const Matrix& x, std::span<const std::size_t> rows, std::span<const std::size_t> cols);

}  // namespace qus
