#include "qus/svm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qus/error.hpp"

namespace qus {
namespace {

constexpr double kTau = 1e-12;

}  // namespace

double rbf_kernel(const Vector& u, const Vector& v, double gamma) {
    return std::exp(-gamma * (u - v).squaredNorm());
}

SvmFit svm_train_detailed(const Matrix& x, std::span<const int> labels, const SvmParams& params) {
    const auto n = static_cast<std::size_t>(x.rows());
    require(labels.size() == n, ErrorCode::shape_mismatch, "label count does not match rows");
    require_binary_labels(labels);
    require(params.c > 0.0 && params.gamma > 0.0, ErrorCode::invalid_argument, "C and gamma must be positive");
    require(x.allFinite(), ErrorCode::non_finite_input, "non-finite training input");

    const double flip = labels[0] == 1 ? 1.0 : -1.0;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = flip * labels[i];
    }

    Matrix k(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            k(i, j) = k(j, i) = std::exp(-params.gamma * (x.row(i) - x.row(j)).squaredNorm());
        }
    }

    const double c = params.c;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    auto in_up = [&](std::size_t t) { return (y[t] > 0) ? alpha[t] < c : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return (y[t] > 0) ? alpha[t] > 0.0 : alpha[t] < c; };

    SvmFit fit;
    std::size_t iter = 0;
    double gap = 0.0;
    for (;; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        double best_obj = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) {
                continue;
            }
            const double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            const double b = gmax - v;
            if (i < n && b > 0.0) {
                const double a = std::max(k(i, i) + k(t, t) - 2.0 * k(i, t), kTau);
                const double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        gap = gmax - gmin;
        if (i == n || j == n || gap < params.tolerance) {
            break;
        }
        if (iter >= params.max_iterations) {
            fail(ErrorCode::not_converged, "SMO did not converge after " + std::to_string(iter) +
                                               " iterations (gap " + std::to_string(gap) + ", C " +
                                               std::to_string(c) + ", gamma " + std::to_string(params.gamma) + ")");
        }

        const double ai_old = alpha[i];
        const double aj_old = alpha[j];
        const double quad = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), kTau);
        if (y[i] != y[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - ai_old;
        const double dj = alpha[j] - aj_old;
        for (std::size_t t = 0; t < n; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            grad[t] += y[t] * (y[i] * k(ti, static_cast<Eigen::Index>(i)) * di +
                               y[j] * k(ti, static_cast<Eigen::Index>(j)) * dj);
        }
    }

    // Bias: average y*G over free vectors, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            sum_free += yg;
            ++n_free;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    std::vector<std::size_t> sv;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            sv.push_back(t);
        }
    }
    SvmModel& m = fit.model;
    m.gamma = params.gamma;
    m.c = c;
    m.bias = -flip * rho;
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    m.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t s = 0; s < sv.size(); ++s) {
        m.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(static_cast<Eigen::Index>(sv[s]));
        m.dual_coef(static_cast<Eigen::Index>(s)) = flip * y[sv[s]] * alpha[sv[s]];
    }
    double w2 = 0.0;
    for (std::size_t a = 0; a < sv.size(); ++a) {
        for (std::size_t b = 0; b < sv.size(); ++b) {
            w2 += m.dual_coef(static_cast<Eigen::Index>(a)) * m.dual_coef(static_cast<Eigen::Index>(b)) *
                  k(static_cast<Eigen::Index>(sv[a]), static_cast<Eigen::Index>(sv[b]));
        }
    }
    m.w_norm = std::sqrt(std::max(w2, 0.0));
    require(m.w_norm > 0.0, ErrorCode::not_converged, "SVM solution has zero margin norm");

    fit.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Eigen::Index>(n));
    fit.train_decision.resize(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        // y_t G_t = y_t (Q alpha)_t - y_t = f_t + rho - y_t in the oriented problem
        fit.train_decision(static_cast<Eigen::Index>(t)) = flip * (y[t] * grad[t] + y[t] - rho);
    }
    fit.iterations = iter;
    fit.final_gap = gap;
    return fit;
}

SvmModel svm_train(const Matrix& x, std::span<const int> labels, const SvmParams& params) {
    return svm_train_detailed(x, labels, params).model;
}

double svm_decision(const SvmModel& model, const Vector& x) {
    require(x.size() == model.support_vectors.cols(), ErrorCode::shape_mismatch, "feature vector length mismatch");
    double f = model.bias;
    for (Eigen::Index s = 0; s < model.support_vectors.rows(); ++s) {
        f += model.dual_coef(s) * std::exp(-model.gamma * (model.support_vectors.row(s).transpose() - x).squaredNorm());
    }
    return f;
}

SvmDistance svm_distance(const SvmModel& model, const Vector& x) {
    const double f = svm_decision(model, x);
    SvmDistance d;
    d.sign = f >= 0.0 ? 1 : -1;
    d.value = d.sign * std::abs(f) / model.w_norm;
    return d;
}

}  // namespace qus
