#include "qus/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "qus/error.hpp"
#include "qus/random.hpp"

namespace qus {
namespace {

void check_scores(std::span<const double> scores, std::span<const int> labels) {
    require(scores.size() == labels.size(), ErrorCode::shape_mismatch, "scores and labels differ in length");
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        require(std::isfinite(scores[i]), ErrorCode::non_finite_input, "non-finite score");
        require(labels[i] == 1 || labels[i] == -1, ErrorCode::invalid_argument, "labels must be -1 or +1");
        pos = pos || labels[i] == 1;
        neg = neg || labels[i] == -1;
    }
    require(pos && neg, ErrorCode::single_class, "need both classes");
}

std::vector<std::size_t> order_descending(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    check_scores(scores, labels);
    const auto order = order_descending(scores);
    const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;

    RocResult r;
    r.points.push_back({0.0, 0.0});
    // integer pair counts keep the area exact: twice the Mann-Whitney U
    double tp = 0.0;
    double fp = 0.0;
    double twice_u = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        double dtp = 0.0;
        double dfp = 0.0;
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            (labels[order[i]] == 1 ? dtp : dfp) += 1.0;
        }
        twice_u += dfp * (2.0 * tp + dtp);
        tp += dtp;
        fp += dfp;
        r.points.push_back({fp / n_neg, tp / n_pos});
    }
    r.auc = twice_u / (2.0 * n_pos * n_neg);
    return r;
}

BinaryMetrics operating_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_scores(scores, labels);
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) {
            (predicted ? tp : fn) += 1.0;
        } else {
            (predicted ? fp : tn) += 1.0;
        }
    }
    return {(tp + tn) / static_cast<double>(scores.size()), tp / (tp + fn), tn / (tn + fp)};
}

double youden_threshold(std::span<const double> scores, std::span<const int> labels) {
    check_scores(scores, labels);
    const auto order = order_descending(scores);
    const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    double tp = 0.0;
    double fp = 0.0;
    double best_j = -std::numeric_limits<double>::infinity();
    double best = scores[order.front()];
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            (labels[order[i]] == 1 ? tp : fp) += 1.0;
        }
        const double j = tp / n_pos - fp / n_neg;
        if (j > best_j) {
            best_j = j;
            best = i < order.size() ? (s + scores[order[i]]) / 2.0 : s;
        }
    }
    return best;
}

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            ++j;
        }
        const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            ranks[order[t]] = mean_rank;
        }
        i = j;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorCode::shape_mismatch, "spearman inputs differ in length");
    require(x.size() >= 3, ErrorCode::invalid_argument, "spearman needs at least 3 pairs");
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(std::isfinite(x[i]) && std::isfinite(y[i]), ErrorCode::non_finite_input, "non-finite spearman input");
    }
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const double mean = (static_cast<double>(x.size()) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    require(sxx > 0.0 && syy > 0.0, ErrorCode::zero_rank_variance, "zero rank variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SplitPlan make_splits(std::span<const int> labels, std::size_t repeats, double train_fraction, std::uint64_t seed) {
    require(repeats >= 1, ErrorCode::invalid_argument, "repeats must be >= 1");
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::invalid_argument,
            "train fraction must lie in (0, 1)");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] == 1 || labels[i] == -1, ErrorCode::invalid_argument, "labels must be -1 or +1");
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    require(pos.size() >= 4 && neg.size() >= 4, ErrorCode::single_class,
            "class too small to stratify: need >= 4 samples per class");

    SplitPlan plan;
    plan.repeats = repeats;
    plan.train_fraction = train_fraction;
    plan.seed = seed;
    for (std::size_t r = 0; r < repeats; ++r) {
        Rng rng(derive_seed(seed, r));
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
        for (auto* cls : {&pos, &neg}) {
            auto members = *cls;
            shuffle(members, rng);
            const auto n = members.size();
            const auto n_train = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n))), 1, n - 1);
            train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
            test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
        }
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
        plan.train.push_back(std::move(train));
        plan.test.push_back(std::move(test));
    }
    return plan;
}

MetricSummary summarize(std::span<const double> values) {
    MetricSummary s;
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

std::vector<double> default_size_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 10; ++i) {
        t.push_back(i / 10.0);
    }
    return t;
}

std::vector<MetricRow> size_threshold_sweep(std::span<const double> area_cm2, std::span<const int> labels,
                                            std::span<const RepeatResult> repeats,
                                            std::span<const double> thresholds, const std::string& scorer,
                                            const std::string& category_filter) {
    require(area_cm2.size() == labels.size(), ErrorCode::shape_mismatch, "areas and labels differ in length");
    std::vector<MetricRow> rows;
    for (double threshold : thresholds) {
        MetricRow row;
        row.scorer = scorer;
        row.category_filter = category_filter;
        row.threshold_cm2 = threshold;
        std::vector<double> auc, acc, sens, spec;
        double sum_train = 0.0;
        double sum_test = 0.0;
        for (const auto& rep : repeats) {
            require(rep.train.size() == rep.train_scores.size() && rep.test.size() == rep.test_scores.size(),
                    ErrorCode::shape_mismatch, "repeat scores do not match its rows");
            std::vector<double> s;
            std::vector<int> y;
            for (std::size_t i = 0; i < rep.test.size(); ++i) {
                if (area_cm2[rep.test[i]] > threshold) {
                    s.push_back(rep.test_scores[i]);
                    y.push_back(labels[rep.test[i]]);
                }
            }
            const bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), -1) > 0;
            if (!both) {
                continue;
            }
            std::vector<int> train_y;
            for (auto idx : rep.train) {
                train_y.push_back(labels[idx]);
            }
            const double cut = youden_threshold(rep.train_scores, train_y);
            const auto m = operating_metrics(s, y, cut);
            auc.push_back(roc_auc(s, y).auc);
            acc.push_back(m.accuracy);
            sens.push_back(m.sensitivity);
            spec.push_back(m.specificity);
            sum_train += static_cast<double>(rep.train.size());
            sum_test += static_cast<double>(s.size());
        }
        for (std::size_t i = 0; i < area_cm2.size(); ++i) {
            row.n_lesions += area_cm2[i] > threshold ? 1 : 0;
        }
        row.n_repeats = auc.size();
        row.available = !auc.empty();
        if (row.available) {
            const auto k = static_cast<double>(auc.size());
            row.n_train = sum_train / k;
            row.n_test = sum_test / k;
            row.auc = summarize(auc);
            row.accuracy = summarize(acc);
            row.sensitivity = summarize(sens);
            row.specificity = summarize(spec);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json report_to_json(std::span<const MetricRow> rows) {
    auto metric = [](const MetricSummary& m) { return nlohmann::json{{"mean", m.mean}, {"std", m.std}}; };
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {
            {"scorer", r.scorer},
            {"category_filter", r.category_filter},
            {"threshold_cm2", r.threshold_cm2},
            {"available", r.available},
            {"n_lesions", r.n_lesions},
            {"n_repeats", r.n_repeats},
        };
        if (r.available) {
            j["n_train"] = r.n_train;
            j["n_test"] = r.n_test;
            j["auc"] = metric(r.auc);
            j["acc"] = metric(r.accuracy);
            j["sens"] = metric(r.sensitivity);
            j["spec"] = metric(r.specificity);
        }
        out.push_back(std::move(j));
    }
    return out;
}

std::string report_to_csv(std::span<const MetricRow> rows) {
    std::ostringstream os;
    os << "scorer,category_filter,threshold_cm2,available,n_lesions,n_repeats,n_train,n_test,"
          "auc_mean,auc_std,acc_mean,acc_std,sens_mean,sens_std,spec_mean,spec_std\n";
    os << std::setprecision(10);
    for (const auto& r : rows) {
        os << r.scorer << ',' << r.category_filter << ',' << r.threshold_cm2 << ',' << (r.available ? 1 : 0) << ','
           << r.n_lesions << ',' << r.n_repeats;
        if (r.available) {
            os << ',' << r.n_train << ',' << r.n_test;
            for (const auto* m : {&r.auc, &r.accuracy, &r.sensitivity, &r.specificity}) {
                os << ',' << m->mean << ',' << m->std;
            }
        } else {
            os << ",,,,,,,,,,";
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace qus
