// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
// Usage: qus_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "qus/burr.hpp"
#include "qus/dsi.hpp"
#include "qus/error.hpp"
#include "qus/eval.hpp"
#include "qus/hscan.hpp"
#include "qus/phantom.hpp"
#include "qus/pipeline.hpp"
#include "qus/random.hpp"
#include "qus/region.hpp"
#include "qus/selection.hpp"
#include "qus/svm.hpp"
#include "support.hpp"

using namespace qus;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Collects sub-checks; the first failures are kept for the report line.
struct Checker {
    Outcome out;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            out.ok = false;
            if (std::count_if(notes.begin(), notes.end(), [](auto& n) { return n.rfind("FAILED", 0) == 0; }) < 3) {
                notes.push_back("FAILED " + what);
            }
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
    Outcome done() {
        for (std::size_t i = 0; i < notes.size(); ++i) out.detail += (i ? "; " : "") + notes[i];
        return out;
    }
};

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

fs::path work_dir() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("qus_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::vector<FeatureRow> extract_cohort_rows(const CohortConfig& cohort, std::uint64_t seed, const std::string& name) {
    const auto manifest = synth_cohort(cohort, seed, work_dir() / name, jobs());
    std::vector<std::string> warnings;
    return extract_cohort(manifest, AnalysisOptions{}, jobs(), false, warnings);
}

const MetricRow& find_row(const std::vector<MetricRow>& report, const std::string& scorer, const std::string& filter,
                          double threshold) {
    for (const auto& r : report) {
        if (r.scorer == scorer && r.category_filter == filter && std::abs(r.threshold_cm2 - threshold) < 1e-12) {
            return r;
        }
    }
    fail(ErrorCode::invalid_argument, "report row missing: " + scorer + "/" + filter);
}

// ---------------------------------------------------------------------------

Outcome burr_round_trip() {
    Checker c;
    const auto samples = sample_burr(1.0, 3.0, 100000, 2024);
    const auto fit = fit_burr(build_histogram(samples, 0.10));
    c.expect(std::abs(fit.lambda_hat - 1.0) <= 0.03, "lambda within 3%");
    c.expect(std::abs(fit.b_hat - 3.0) <= 0.15, "b within 0.15");
    c.expect(fit.r_squared >= 0.96, "R^2 >= 0.96");
    c.note("lambda=" + fmt("%.4f", fit.lambda_hat) + " b=" + fmt("%.4f", fit.b_hat) +
           " R2=" + fmt("%.4f", fit.r_squared));
    return c.done();
}

Outcome histogram_bins() {
    Checker c;
    const auto n10 = histogram_bin_count(2290, 0.10);
    const auto n2 = histogram_bin_count(2290, 0.02);
    c.expect(n10 == 229, "2290 @ 10% -> 229");
    c.expect(n2 == 46, "2290 @ 2% -> 46");
    const auto h = build_histogram(sample_burr(1.0, 3.0, 2290, 1), 0.10);
    c.expect(h.densities.size() == 229, "histogram has 229 bins");
    c.note("bins " + std::to_string(n10) + " / " + std::to_string(n2));
    return c.done();
}

Outcome hscan_checks() {
    Checker c;
    const auto bank = build_filter_bank();
    for (double f : {5.2e6, 12.4e6}) {
        RfFrame rf{Grid<double>(8, 1000), Geometry{}};
        for (std::size_t l = 0; l < 8; ++l)
            for (std::size_t s = 0; s < 1000; ++s)
                rf.samples(l, s) = std::sin(2 * std::numbers::pi * f * double(s) / rf.geometry.fs_hz + 0.3 * double(l));
        const auto map = color_level_map(rf, bank);
        const std::uint16_t want = f < 1e7 ? 1 : 256;
        c.expect(std::all_of(map.data().begin(), map.data().end(), [&](auto v) { return v == want; }),
                 fmt("tone %.1f MHz level", f / 1e6));
    }

    LesionSpec spec;
    spec.center_line = 72;
    spec.center_sample = 512;
    spec.semi_axis_lines = 30;
    spec.semi_axis_samples = 200;
    spec.scatterer_freq_hz = 8.0e6;
    const PhantomGeometry geo;
    const auto frame = synth_lesion_frame(spec, geo, 0.0, 31).rf;
    RfFrame loud = frame;
    for (auto& v : loud.samples.data()) v *= 10.0;
    c.expect(color_level_map(frame, bank) == color_level_map(loud, bank), "x10 gain invariance");

    // same speckle realization with and without attenuation
    const auto attenuated = synth_lesion_frame(spec, geo, 1.0, 31).rf;
    const AttenuationSpec att{1.0, geo.attenuation_zones, geo.geometry.f0_hz};
    const auto restored = correct_attenuation(attenuated, att);
    double worst = 0.0;
    for (const auto& z : depth_zones(geo.n_depth, att.n_zones, geo.geometry.axial_spacing_m)) {
        double ref = 0.0;
        double got = 0.0;
        for (std::size_t l = 0; l < geo.n_lines; l += 8) {
            const auto a = frame.samples.line(l).subspan(z.start, z.length);
            const auto b = restored.samples.line(l).subspan(z.start, z.length);
            ref += oracle::spectral_centroid({a.begin(), a.end()}, geo.geometry.fs_hz);
            got += oracle::spectral_centroid({b.begin(), b.end()}, geo.geometry.fs_hz);
        }
        worst = std::max(worst, std::abs(got / ref - 1.0));
    }
    c.expect(worst <= 0.02, "zone centroids within 2%");
    c.note("worst zone centroid error " + fmt("%.2e", worst));
    return c.done();
}

double oracle_roughness(const BinaryImage& img) {
    std::vector<std::pair<long, long>> pts;
    for (std::size_t x = 0; x < img.lines(); ++x)
        for (std::size_t y = 0; y < img.depth(); ++y)
            if (img(x, y)) pts.emplace_back(long(x), long(y));
    const auto hull = oracle::jarvis_hull(pts);
    const double h = oracle::lattice_points_in_hull(hull, long(img.lines()), long(img.depth()));
    return (h - double(pts.size())) / double(pts.size());
}

Outcome geometry_checks() {
    Checker c;
    BinaryImage square(80, 80, 0);
    for (std::size_t x = 15; x < 65; ++x)
        for (std::size_t y = 15; y < 65; ++y) square(x, y) = 1;
    const double sq = convex_hull(square).roughness;
    c.expect(sq < 0.02, "square roughness < 0.02");

    BinaryImage plus(70, 70, 0);
    for (std::size_t x = 10; x < 60; ++x)
        for (std::size_t y = 28; y < 42; ++y) plus(x, y) = 1;
    for (std::size_t x = 28; x < 42; ++x)
        for (std::size_t y = 10; y < 60; ++y) plus(x, y) = 1;
    const double pr = convex_hull(plus).roughness;
    const double po = oracle_roughness(plus);
    c.expect(std::abs(pr / po - 1.0) <= 0.02, "plus roughness within 2% of oracle");

    const long r0 = 50;
    BinaryImage disk(160, 160, 0);
    for (long x = 0; x < 160; ++x)
        for (long y = 0; y < 160; ++y)
            if ((x - 80) * (x - 80) + (y - 80) * (y - 80) <= r0 * r0) disk(std::size_t(x), std::size_t(y)) = 1;
    const auto m = margins(disk, 0.10);
    const double pi = std::numbers::pi;
    const double inner = double(count_set(m.inner)) / (pi * (50.0 * 50.0 - 45.0 * 45.0));
    const double outer = double(count_set(m.outer)) / (pi * (55.0 * 55.0 - 50.0 * 50.0));
    c.expect(m.disk_radius == 5, "disk radius 5");
    c.expect(std::abs(inner - 1.0) <= 0.05, "inner annulus within 5%");
    c.expect(std::abs(outer - 1.0) <= 0.05, "outer annulus within 5%");
    c.note("square " + fmt("%.4f", sq) + ", plus " + fmt("%.4f", pr) + " vs " + fmt("%.4f", po) +
           ", annuli " + fmt("%+.3f", inner - 1.0) + " / " + fmt("%+.3f", outer - 1.0));
    return c.done();
}

struct Dataset {
    Matrix x;
    Labels y;
};

Dataset xor_set(std::uint64_t seed) {
    Rng rng(seed);
    Dataset d{Matrix(100, 2), Labels(100)};
    for (Eigen::Index i = 0; i < 100; ++i) {
        const double a = (i & 1) ? 1.0 : -1.0;
        const double b = (i & 2) ? 1.0 : -1.0;
        d.x(i, 0) = a + 0.25 * rng.normal();
        d.x(i, 1) = b + 0.25 * rng.normal();
        d.y[std::size_t(i)] = a * b > 0 ? 1 : -1;
    }
    return d;
}

Dataset overlap_set(std::uint64_t seed, std::size_t d) {
    Rng rng(seed);
    Dataset s{Matrix(120, Eigen::Index(d)), Labels(120)};
    for (Eigen::Index i = 0; i < 120; ++i) {
        s.y[std::size_t(i)] = i % 2 ? 1 : -1;
        for (Eigen::Index j = 0; j < Eigen::Index(d); ++j) s.x(i, j) = rng.normal() + 0.6 * s.y[std::size_t(i)];
    }
    return s;
}

Outcome svm_checks() {
    Checker c;
    {
        const auto d = xor_set(1);
        const auto m = svm_train(d.x, d.y, SvmParams{10.0, 1.0});
        int wrong = 0;
        for (Eigen::Index i = 0; i < d.x.rows(); ++i)
            wrong += svm_distance(m, d.x.row(i).transpose()).sign != d.y[std::size_t(i)];
        c.expect(wrong == 0, "XOR training accuracy 100%");
    }

    double worst_kkt = 0.0;
    double worst_margin = 0.0;
    double worst_kernel = 0.0;
    double worst_flip = 0.0;
    std::size_t models = 0;
    std::vector<std::pair<Dataset, SvmParams>> cases;
    for (std::uint64_t s = 0; s < 4; ++s) {
        cases.push_back({xor_set(10 + s), SvmParams{10.0, 1.0}});
        for (double cc : {0.1, 1.0, 10.0, 100.0})
            for (double g : {0.01, 0.1, 1.0, 10.0}) cases.push_back({overlap_set(s, 3), SvmParams{cc, g}});
    }
    for (const auto& [d, p] : cases) {
        const auto fit = svm_train_detailed(d.x, d.y, p);
        ++models;
        double balance = 0.0;
        for (std::size_t i = 0; i < d.y.size(); ++i) {
            const double a = fit.alpha(Eigen::Index(i));
            const double yf = d.y[i] * fit.train_decision(Eigen::Index(i));
            balance += a * d.y[i];
            worst_kkt = std::max({worst_kkt, -a, a - p.c});
            if (a <= 0.0) {
                worst_kkt = std::max(worst_kkt, 1.0 - yf);
            } else if (a >= p.c) {
                worst_kkt = std::max(worst_kkt, yf - 1.0);
            } else {
                worst_kkt = std::max(worst_kkt, std::abs(yf - 1.0));
                worst_margin = std::max(worst_margin, std::abs(std::abs(fit.train_decision(Eigen::Index(i))) - 1.0));
            }
        }
        worst_kkt = std::max(worst_kkt, std::abs(balance));

        Rng rng(models);
        Labels flipped = d.y;
        for (auto& v : flipped) v = -v;
        const auto other = svm_train(d.x, flipped, p);
        for (int t = 0; t < 10; ++t) {
            Vector q(d.x.cols());
            for (Eigen::Index j = 0; j < q.size(); ++j) q(j) = 1.5 * rng.normal();
            double f = fit.model.bias;
            for (Eigen::Index i = 0; i < fit.model.support_vectors.rows(); ++i)
                f += fit.model.dual_coef(i) *
                     std::exp(-p.gamma * (fit.model.support_vectors.row(i).transpose() - q).squaredNorm());
            worst_kernel = std::max(worst_kernel, std::abs(svm_decision(fit.model, q) - f));
            worst_flip = std::max(worst_flip, std::abs(svm_distance(fit.model, q).value + svm_distance(other, q).value));
        }
    }
    c.expect(worst_kkt <= 1e-3, "dual feasibility and KKT within 1e-3");
    c.expect(worst_margin <= 1e-2, "free support vectors |f| = 1 +- 1e-2");
    c.expect(worst_kernel <= 1e-9, "kernel-sum oracle within 1e-9");
    c.expect(worst_flip <= 1e-6, "label flip negates distance within 1e-6");
    c.note(std::to_string(models) + " models; KKT " + fmt("%.1e", worst_kkt) + ", margin " + fmt("%.1e", worst_margin) +
           ", kernel " + fmt("%.1e", worst_kernel) + ", flip " + fmt("%.1e", worst_flip));
    return c.done();
}

Outcome auc_checks() {
    Checker c;
    double worst = 0.0;
    double worst_sym = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const std::size_t n = 50 + seed % 150;
        std::vector<double> s(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.4 ? 1 : -1;
            s[i] = std::round((rng.normal() + 0.8 * (y[i] == 1)) * 3.0) / 3.0;  // deliberate ties
        }
        y[0] = 1;
        y[1] = -1;
        std::vector<double> neg(n);
        std::transform(s.begin(), s.end(), neg.begin(), [](double v) { return -v; });
        const double a = roc_auc(s, y).auc;
        worst = std::max(worst, std::abs(a - oracle::pairwise_auc(s, y)));
        worst_sym = std::max(worst_sym, std::abs(roc_auc(neg, y).auc - (1.0 - a)));
    }
    c.expect(worst <= 1e-12, "pairwise oracle within 1e-12");
    c.expect(worst_sym <= 1e-12, "AUC(-s) = 1 - AUC(s)");
    c.note("max |AUC - pairwise| " + fmt("%.1e", worst) + ", max symmetry error " + fmt("%.1e", worst_sym));
    return c.done();
}

PipelineConfig acceptance_config() {
    PipelineConfig cfg;
    cfg.jobs = jobs();
    return cfg;
}

const std::vector<FeatureRow>& default_cohort_rows() {
    static const auto rows = extract_cohort_rows(acceptance_config().cohort, 7, "default");
    return rows;
}

Outcome end_to_end() {
    Checker c;
    const auto& rows = default_cohort_rows();
    c.expect(rows.size() == 80, "80 lesions extracted");
    const auto report = evaluate_rows(rows, default_feature_subset(), acceptance_config());
    const auto& svm = find_row(report, "svm_distance", "all", 0.0);
    const auto& pc1 = find_row(report, "pc1", "all", 0.0);
    const auto& proj = find_row(report, "projection", "all", 0.0);
    c.expect(svm.n_repeats == 5, "five usable repeats");
    c.expect(svm.auc.mean >= 0.95, "SVM-distance AUC >= 0.95");
    c.expect(svm.accuracy.mean >= 0.90, "SVM-distance accuracy >= 0.90");
    c.expect(pc1.auc.mean >= 0.90, "PC1 AUC >= 0.90");
    c.expect(proj.auc.mean >= 0.90, "projection AUC >= 0.90");
    c.note("AUC svm " + fmt("%.3f", svm.auc.mean) + " (acc " + fmt("%.3f", svm.accuracy.mean) + "), pc1 " +
           fmt("%.3f", pc1.auc.mean) + ", projection " + fmt("%.3f", proj.auc.mean));
    return c.done();
}

Outcome size_dependence() {
    Checker c;
    auto cohort = acceptance_config().cohort;
    cohort.size_noise = 1.0;
    const auto rows = extract_cohort_rows(cohort, 11, "size_noise");
    const auto report = evaluate_rows(rows, default_feature_subset(), acceptance_config());
    std::vector<double> thr;
    std::vector<double> auc;
    std::string trace;
    for (const auto& r : report) {
        if (r.scorer == "svm_distance" && r.category_filter == "all" && r.available) {
            thr.push_back(r.threshold_cm2);
            auc.push_back(r.auc.mean);
            trace += (trace.empty() ? "" : " ") + fmt("%.3f", r.auc.mean);
        }
    }
    c.expect(thr.size() >= 3, "at least three available thresholds");
    const double rho = thr.size() >= 3 ? spearman(thr, auc) : 0.0;
    c.expect(rho > 0.0, "Spearman(threshold, AUC) > 0");
    c.note("rho " + fmt("%.3f", rho) + " over " + std::to_string(thr.size()) + " thresholds; AUC " + trace);
    return c.done();
}

Outcome dsi_checks() {
    Checker c;
    auto cfg = acceptance_config();
    TrainOutcome trained = train_pipeline(default_cohort_rows(), cfg, true);
    const auto& model = trained.model;
    const Scorer scorer = Scorer::svm_distance;
    const auto lim = model.limits_for(scorer);
    ColorScale scale = make_scale(lim.lo, lim.hi);
    scale.lut = build_lut(cfg.dsi.lut_anchors);
    c.expect(score_to_color(lim.lo, scale) == scale.lut[0], "lo -> lut[0]");
    c.expect(score_to_color(0.5 * (lim.lo + lim.hi), scale) == scale.lut[128], "mid -> lut[128]");
    c.expect(score_to_color(lim.hi, scale) == scale.lut[255], "hi -> lut[255]");

    // archetype pairs on smaller frames keep the 100 renders quick
    CohortConfig pairs = cfg.cohort;
    pairs.n_benign = 50;
    pairs.n_malignant = 50;
    pairs.common_fraction = 0.0;
    pairs.uncommon_fraction = 0.0;
    pairs.min_area_cm2 = 0.1;
    pairs.max_area_cm2 = 0.4;
    pairs.geometry.n_lines = 96;
    pairs.geometry.n_depth = 512;
    const auto plan = plan_cohort(pairs, 99);

    std::vector<double> hue(plan.size());
    std::vector<int> range_ok(plan.size(), 1);
    std::vector<int> deterministic(plan.size(), 1);
    {
        std::vector<std::thread> pool;
        const std::size_t n_threads = jobs();
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < plan.size(); i += n_threads) {
                    const auto frame = synth_lesion_frame(plan[i].truth, pairs.geometry, pairs.alpha_db_mhz_cm,
                                                          derive_seed(99, i));
                    const auto out = render_frame(frame.rf, frame.mask, model, scorer, cfg);
                    hue[i] = mean_hue_index(out.smoothed, out.scale);
                    double lo = INFINITY, hi = -INFINITY;
                    for (std::size_t p = 0; p < out.raw.values.size(); ++p) {
                        if (out.raw.mask.data()[p] == 0) continue;
                        lo = std::min(lo, out.raw.values.data()[p]);
                        hi = std::max(hi, out.raw.values.data()[p]);
                    }
                    for (std::size_t p = 0; p < out.smoothed.values.size(); ++p) {
                        if (out.smoothed.mask.data()[p] == 0) continue;
                        const double v = out.smoothed.values.data()[p];
                        if (v < lo - 1e-12 || v > hi + 1e-12) range_ok[i] = 0;
                    }
                    if (i % 10 == 0) {
                        const auto again = render_frame(frame.rf, frame.mask, model, scorer, cfg);
                        deterministic[i] = again.image == out.image;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    std::size_t wins = 0;
    for (std::size_t k = 0; k < 50; ++k) wins += hue[50 + k] > hue[k];
    c.expect(std::all_of(range_ok.begin(), range_ok.end(), [](int v) { return v; }), "smoothing preserves range");
    c.expect(std::all_of(deterministic.begin(), deterministic.end(), [](int v) { return v; }), "bit-identical re-render");
    c.expect(wins >= 45, "malignant hue higher in >= 90% of pairs");
    c.note("malignant hue higher in " + std::to_string(wins) + "/50 pairs");
    return c.done();
}

Outcome selection_checks() {
    Checker c;
    std::size_t clean = 0;
    std::string picks;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const std::size_t n = 60;
        Matrix x(Eigen::Index(n), 10);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i < n / 2 ? -1 : 1;
            for (Eigen::Index j = 0; j < 10; ++j) {
                // columns 0-4 carry the label, 5-9 are noise
                x(Eigen::Index(i), j) = rng.normal() + (j < 5 ? 1.2 * y[i] : 0.0);
            }
        }
        std::vector<std::size_t> cand(10);
        for (std::size_t j = 0; j < 10; ++j) cand[j] = j;
        SelectOptions opt;
        opt.jobs = jobs();
        const auto r = select_features(x, y, cand, opt);
        c.expect(r.n_enumerated == 1023, "1023 subsets enumerated");
        const bool noise = std::any_of(r.best.begin(), r.best.end(), [](auto j) { return j >= 5; });
        clean += noise ? 0 : 1;
        std::string s;
        for (auto j : r.best) s += std::to_string(j);
        picks += (picks.empty() ? "" : " ") + s;
    }
    c.expect(clean >= 4, "no noise feature in >= 4 of 5 runs");
    c.note(std::to_string(clean) + "/5 noise-free; subsets " + picks);
    return c.done();
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "Burr round-trip", 5, burr_round_trip},
        {2, "histogram bin rule", 1, histogram_bins},
        {3, "H-scan endpoints and invariance", 10, hscan_checks},
        {4, "geometry", 5, geometry_checks},
        {5, "SVM correctness", 30, svm_checks},
        {6, "AUC oracle equivalence", 10, auc_checks},
        {7, "end-to-end synthetic cohort", 180, end_to_end},
        {8, "size dependence", 180, size_dependence},
        {9, "DSI rendering", 60, dsi_checks},
        {10, "feature selection", 120, selection_checks},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& cr : all) {
        if (!wanted.empty() && !wanted.count(cr.id)) continue;
        if (cr.id == 9) {
            default_cohort_rows();  // shared with criterion 7; not part of the rendering budget
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > cr.limit_s) {
            o.ok = false;
            o.detail += "; FAILED runtime limit " + fmt("%.0f s", cr.limit_s);
        }
        failures += o.ok ? 0 : 1;
        std::printf("%s  %2d  %-32s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", cr.id, cr.name, dt, o.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(work_dir());
    return failures == 0 ? 0 : 1;
}
