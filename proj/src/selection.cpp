#include "qus/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "qus/detail/parallel.hpp"
#include "qus/error.hpp"
#include "qus/eval.hpp"
#include "qus/random.hpp"

namespace qus {

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
    require(folds >= 2, ErrorCode::invalid_argument, "need at least 2 folds");
    std::vector<std::size_t> fold(labels.size(), 0);
    Rng rng(seed);
    for (int cls : {1, -1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                members.push_back(i);
            }
        }
        shuffle(members, rng);
        for (std::size_t p = 0; p < members.size(); ++p) {
            fold[members[p]] = p % folds;
        }
    }
    return fold;
}

TuneResult tune_hyperparams(const Matrix& x, std::span<const int> labels, const TuneOptions& options) {
    require(!options.c_grid.empty() && !options.gamma_grid.empty(), ErrorCode::invalid_argument,
            "hyperparameter grids must be non-empty");
    require(static_cast<Eigen::Index>(labels.size()) == x.rows(), ErrorCode::shape_mismatch,
            "label count does not match rows");
    require_binary_labels(labels);

    TuneResult result;
    auto c_grid = options.c_grid;
    auto g_grid = options.gamma_grid;
    std::sort(c_grid.begin(), c_grid.end());
    std::sort(g_grid.begin(), g_grid.end());
    if (c_grid.size() == 1 && g_grid.size() == 1) {
        result.c = c_grid[0];
        result.gamma = g_grid[0];
        result.grid.push_back({c_grid[0], g_grid[0], 0.0, 0.0, false});
        return result;
    }

    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const auto smaller = std::min(n_pos, labels.size() - n_pos);
    std::size_t folds = std::min(options.folds, smaller);
    require(folds >= 2, ErrorCode::single_class, "too few samples per class for cross-validation");
    if (folds < options.folds) {
        result.warnings.push_back("reduced cross-validation folds from " + std::to_string(options.folds) + " to " +
                                  std::to_string(folds) + " (smaller class has " + std::to_string(smaller) +
                                  " samples)");
    }
    result.folds_used = folds;
    const auto fold = stratified_folds(labels, folds, options.seed);

    std::vector<std::vector<std::size_t>> train_rows(folds);
    std::vector<std::vector<std::size_t>> test_rows(folds);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            (fold[i] == f ? test_rows[f] : train_rows[f]).push_back(i);
        }
    }
    std::vector<std::size_t> all_cols(static_cast<std::size_t>(x.cols()));
    std::iota(all_cols.begin(), all_cols.end(), 0);

    result.grid.resize(c_grid.size() * g_grid.size());
    detail::parallel_for(result.grid.size(), options.jobs, [&](std::size_t p) {
        GridPoint& gp = result.grid[p];
        gp.gamma = g_grid[p / c_grid.size()];
        gp.c = c_grid[p % c_grid.size()];
        std::vector<double> acc;
        try {
            for (std::size_t f = 0; f < folds; ++f) {
                const Matrix xtr = take(x, train_rows[f], all_cols);
                std::vector<int> ytr;
                for (auto i : train_rows[f]) {
                    ytr.push_back(labels[i]);
                }
                const auto model = svm_train(xtr, ytr, SvmParams{gp.c, gp.gamma});
                double correct = 0.0;
                for (auto i : test_rows[f]) {
                    const int predicted = svm_distance(model, x.row(static_cast<Eigen::Index>(i)).transpose()).sign;
                    correct += predicted == labels[i] ? 1.0 : 0.0;
                }
                acc.push_back(correct / static_cast<double>(test_rows[f].size()));
            }
        } catch (const Error&) {
            gp.failed = true;
            return;
        }
        const double k = static_cast<double>(acc.size());
        gp.mean_accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / k;
        double ss = 0.0;
        for (double a : acc) {
            ss += (a - gp.mean_accuracy) * (a - gp.mean_accuracy);
        }
        gp.std_error = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    });

    const GridPoint* best = nullptr;
    for (const auto& gp : result.grid) {
        if (gp.failed) {
            result.warnings.push_back("SVM failed at C=" + std::to_string(gp.c) + " gamma=" + std::to_string(gp.gamma));
        } else if (best == nullptr || gp.mean_accuracy > best->mean_accuracy) {
            best = &gp;
        }
    }
    require(best != nullptr, ErrorCode::not_converged, "SVM failed at every grid point");
    const double floor = best->mean_accuracy - best->std_error - 1e-12;
    // grid is gamma-major ascending, so the first qualifying point has the
    // smallest gamma and, within it, the smallest C
    for (const auto& gp : result.grid) {
        if (!gp.failed && gp.mean_accuracy >= floor) {
            result.c = gp.c;
            result.gamma = gp.gamma;
            break;
        }
    }
    return result;
}

std::vector<double> fit_and_score(const Matrix& x_std, std::span<const int> labels, Scorer scorer,
                                  const SvmParams& svm) {
    std::vector<double> scores(static_cast<std::size_t>(x_std.rows()));
    switch (scorer) {
        case Scorer::pc1: {
            const auto pca = pca_fit(x_std, labels);
            for (Eigen::Index i = 0; i < x_std.rows(); ++i) {
                scores[static_cast<std::size_t>(i)] = pc1_score(pca, x_std.row(i).transpose());
            }
            break;
        }
        case Scorer::projection: {
            const Vector ref = fit_reference(x_std, labels);
            for (Eigen::Index i = 0; i < x_std.rows(); ++i) {
                scores[static_cast<std::size_t>(i)] = projection_score(x_std.row(i).transpose(), ref);
            }
            break;
        }
        case Scorer::svm_distance: {
            SvmParams p = svm;
            if (p.gamma <= 0.0) {
                p.gamma = 1.0 / static_cast<double>(x_std.cols());
            }
            const auto model = svm_train(x_std, labels, p);
            for (Eigen::Index i = 0; i < x_std.rows(); ++i) {
                scores[static_cast<std::size_t>(i)] = svm_distance(model, x_std.row(i).transpose()).value;
            }
            break;
        }
    }
    return scores;
}

SelectionResult select_features(const Matrix& table, std::span<const int> labels,
                                std::span<const std::size_t> candidates, const SelectOptions& options) {
    require(static_cast<Eigen::Index>(labels.size()) == table.rows(), ErrorCode::shape_mismatch,
            "label count does not match rows");
    require(candidates.size() >= 2 && candidates.size() <= 20, ErrorCode::invalid_argument,
            "feature selection needs 2..20 candidate columns");
    require_binary_labels(labels);
    const auto n_pos = std::count(labels.begin(), labels.end(), 1);
    require(n_pos >= 10 && static_cast<std::ptrdiff_t>(labels.size()) - n_pos >= 10, ErrorCode::single_class,
            "feature selection needs >= 10 samples per class");
    for (auto c : candidates) {
        require(static_cast<Eigen::Index>(c) < table.cols(), ErrorCode::invalid_argument, "candidate column out of range");
    }

    const std::size_t m = candidates.size();
    const std::size_t n_subsets = (std::size_t{1} << m) - 1;
    std::vector<std::size_t> rows(static_cast<std::size_t>(table.rows()));
    std::iota(rows.begin(), rows.end(), 0);

    std::vector<std::optional<SubsetScore>> scored(n_subsets);
    std::vector<std::string> errors(n_subsets);
    detail::parallel_for(n_subsets, options.jobs, [&](std::size_t s) {
        const std::size_t mask = s + 1;
        SubsetScore ss;
        for (std::size_t b = 0; b < m; ++b) {
            if ((mask >> b) & 1u) {
                ss.columns.push_back(candidates[b]);
            }
        }
        std::sort(ss.columns.begin(), ss.columns.end());
        try {
            const Matrix raw = take(table, rows, ss.columns);
            const Matrix xs = Standardizer::fit(raw).transform(raw);
            const auto scores = fit_and_score(xs, labels, options.scorer, options.svm);
            ss.auc = roc_auc(scores, labels).auc;
            scored[s] = std::move(ss);
        } catch (const Error& e) {
            errors[s] = e.what();
        }
    });

    SelectionResult result;
    result.n_enumerated = n_subsets;
    const SubsetScore* best = nullptr;
    for (std::size_t s = 0; s < n_subsets; ++s) {
        if (!scored[s]) {
            ++result.n_skipped;
            result.warnings.push_back("skipped subset " + std::to_string(s + 1) + ": " + errors[s]);
            continue;
        }
        const auto& cand = *scored[s];
        if (best == nullptr || cand.auc > best->auc ||
            (cand.auc == best->auc && (cand.columns.size() < best->columns.size() ||
                                       (cand.columns.size() == best->columns.size() && cand.columns < best->columns)))) {
            best = &cand;
        }
    }
    require(best != nullptr, ErrorCode::invalid_argument, "every feature subset failed to score");
    result.best = best->columns;
    result.best_auc = best->auc;
    for (auto& s : scored) {
        if (s) {
            result.scored.push_back(std::move(*s));
        }
    }
    return result;
}

}  // namespace qus
