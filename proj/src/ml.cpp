#include "qus/ml.hpp"

#include <cmath>

#include "qus/error.hpp"

namespace qus {

std::string_view to_string(Scorer scorer) {
    switch (scorer) {
        case Scorer::pc1: return "pc1";
        case Scorer::projection: return "projection";
        case Scorer::svm_distance: return "svm_distance";
    }
    return "?";
}

Scorer parse_scorer(std::string_view text) {
    if (text == "pc1") return Scorer::pc1;
    if (text == "projection") return Scorer::projection;
    if (text == "svm_distance") return Scorer::svm_distance;
    fail(ErrorCode::invalid_argument, "unknown scorer '" + std::string(text) + "' (pc1|projection|svm_distance)");
}

void require_binary_labels(std::span<const int> labels) {
    bool pos = false;
    bool neg = false;
    for (int y : labels) {
        require(y == 1 || y == -1, ErrorCode::invalid_argument, "labels must be -1 or +1");
        pos = pos || y == 1;
        neg = neg || y == -1;
    }
    require(pos && neg, ErrorCode::single_class, "need both classes");
}

Standardizer Standardizer::fit(const Matrix& x) {
    require(x.rows() >= 2 && x.cols() >= 1, ErrorCode::invalid_argument, "standardizer needs >= 2 rows");
    require(x.allFinite(), ErrorCode::non_finite_input, "non-finite feature value");
    Standardizer s;
    s.mean = x.colwise().mean().transpose();
    s.std.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean(j)).square().mean();
        s.std(j) = std::sqrt(var);
        require(s.std(j) > 0.0, ErrorCode::zero_variance_feature,
                "zero-variance feature in column " + std::to_string(j));
    }
    return s;
}

Vector Standardizer::transform(const Vector& x) const {
    require(x.size() == mean.size(), ErrorCode::shape_mismatch, "feature vector length mismatch");
    return (x - mean).cwiseQuotient(std);
}

Matrix Standardizer::transform(const Matrix& x) const {
    require(x.cols() == mean.size(), ErrorCode::shape_mismatch, "feature table width mismatch");
    Matrix out = x.rowwise() - mean.transpose();
    return out.array().rowwise() / std.transpose().array();
}

PcaModel pca_fit(const Matrix& x, std::span<const int> labels) {
    const auto n = x.rows();
    const auto d = x.cols();
    require(d >= 1 && n >= 2 && n >= d, ErrorCode::invalid_argument, "PCA needs rows >= columns >= 1");
    require(labels.empty() || static_cast<Eigen::Index>(labels.size()) == n, ErrorCode::shape_mismatch,
            "label count does not match rows");

    PcaModel m;
    m.mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - m.mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    require(eig.info() == Eigen::Success, ErrorCode::not_converged, "covariance eigendecomposition failed");

    // Eigen returns ascending eigenvalues.
    const double top = std::max(eig.eigenvalues()(d - 1), 0.0);
    const double floor = top * 1e-12;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = d - 1; k >= 0; --k) {
        if (eig.eigenvalues()(k) > floor && eig.eigenvalues()(k) > 0.0) {
            keep.push_back(k);
        }
    }
    require(!keep.empty(), ErrorCode::zero_variance_feature, "covariance has no positive eigenvalue");
    m.rank_deficient = static_cast<Eigen::Index>(keep.size()) < d;

    const auto k_out = static_cast<Eigen::Index>(keep.size());
    m.loadings.resize(d, k_out);
    m.eigenvalues.resize(k_out);
    for (Eigen::Index c = 0; c < k_out; ++c) {
        m.loadings.col(c) = eig.eigenvectors().col(keep[static_cast<std::size_t>(c)]);
        m.eigenvalues(c) = eig.eigenvalues()(keep[static_cast<std::size_t>(c)]);
    }
    m.explained_ratio = m.eigenvalues / m.eigenvalues.sum();

    Vector malignant_offset = Vector::Zero(d);
    bool have_malignant = false;
    if (!labels.empty()) {
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[static_cast<std::size_t>(i)] == 1) {
                malignant_offset += centered.row(i).transpose();
                ++count;
            }
        }
        if (count > 0) {
            malignant_offset /= static_cast<double>(count);
            have_malignant = true;
        }
    }
    for (Eigen::Index c = 0; c < k_out; ++c) {
        auto v = m.loadings.col(c);
        double s = have_malignant ? malignant_offset.dot(v) : 0.0;
        if (std::abs(s) <= 1e-12 * (1.0 + malignant_offset.norm())) {
            Eigen::Index pivot = 0;
            for (Eigen::Index j = 0; j < d; ++j) {
                if (std::abs(v(j)) >= std::abs(v(pivot)) - 1e-12) {
                    pivot = j;
                }
            }
            s = v(pivot);
        }
        if (s < 0.0) {
            v = -v;
        }
    }
    return m;
}

double pc1_score(const PcaModel& model, const Vector& x) {
    require(x.size() == model.mean.size(), ErrorCode::shape_mismatch, "feature vector length mismatch");
    return (x - model.mean).dot(model.loadings.col(0));
}

Vector contributions(const PcaModel& model) {
    Vector w = model.loadings.cwiseAbs() * model.explained_ratio;
    return w / w.sum();
}

Vector fit_reference(const Matrix& x, std::span<const int> labels) {
    require(static_cast<Eigen::Index>(labels.size()) == x.rows(), ErrorCode::shape_mismatch,
            "label count does not match rows");
    require_binary_labels(labels);
    Vector mal = Vector::Zero(x.cols());
    Vector ben = Vector::Zero(x.cols());
    double n_mal = 0.0;
    double n_ben = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (labels[static_cast<std::size_t>(i)] == 1) {
            mal += x.row(i).transpose();
            n_mal += 1.0;
        } else {
            ben += x.row(i).transpose();
            n_ben += 1.0;
        }
    }
    const Vector diff = mal / n_mal - ben / n_ben;
    const double norm = diff.norm();
    require(norm > 0.0 && std::isfinite(norm), ErrorCode::degenerate_reference, "degenerate reference");
    return diff / norm;
}

double projection_score(const Vector& x, const Vector& reference) {
    require(x.size() == reference.size(), ErrorCode::shape_mismatch, "reference length mismatch");
    require(std::abs(reference.norm() - 1.0) < 1e-9, ErrorCode::invalid_argument, "reference must be a unit vector");
    return x.dot(reference);
}

Vector column_mean(const Matrix& x, std::span<const std::size_t> rows) {
    Vector out = Vector::Zero(x.cols());
    for (auto r : rows) {
        out += x.row(static_cast<Eigen::Index>(r)).transpose();
    }
    return rows.empty() ? out : Vector(out / static_cast<double>(rows.size()));
}

Matrix take(const Matrix& x, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                x(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    return out;
}

}  // namespace qus
