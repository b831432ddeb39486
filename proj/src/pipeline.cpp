#include "qus/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qus/detail/parallel.hpp"
#include "qus/error.hpp"
#include "qus/frame_io.hpp"
#include "qus/random.hpp"

namespace qus {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json archetype_json(const ArchetypeParams& a) {
    return {{"roughness_amp", a.roughness_amp},
            {"scatterer_freq_mhz", a.scatterer_freq_mhz},
            {"burr_b", a.burr_b},
            {"contrast_db", a.contrast_db}};
}

ArchetypeParams archetype_from(const json& j) {
    return {j.at("roughness_amp").get<double>(), j.at("scatterer_freq_mhz").get<double>(), j.at("burr_b").get<double>(),
            j.at("contrast_db").get<double>()};
}

void reject_unknown_keys(const json& user, const json& defaults, const std::string& where) {
    if (!user.is_object()) {
        return;
    }
    for (const auto& [key, value] : user.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        require(defaults.contains(key), ErrorCode::config_error, "unknown config key: " + path);
        if (value.is_object() && defaults.at(key).is_object()) {
            reject_unknown_keys(value, defaults.at(key), path);
        }
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::vector<int> labels_of(const std::vector<FeatureRow>& rows) {
    std::vector<int> y;
    for (const auto& r : rows) {
        y.push_back(label_sign(r.label));
    }
    return y;
}

}  // namespace

json config_to_json(const PipelineConfig& c) {
    const auto& cc = c.cohort;
    const auto& pg = cc.geometry;
    json anchors = json::array();
    for (const auto& a : c.dsi.lut_anchors) {
        anchors.push_back({{"index", a.index}, {"rgb", {a.color.r, a.color.g, a.color.b}}});
    }
    return {
        {"seed", c.seed},
        {"scorer", std::string(to_string(c.scorer))},
        {"jobs", c.jobs},
        {"paths",
         {{"cohort_dir", c.paths.cohort_dir.string()},
          {"features", c.paths.features.string()},
          {"model", c.paths.model.string()},
          {"report_dir", c.paths.report_dir.string()}}},
        {"cohort",
         {{"n_benign", cc.n_benign},
          {"n_malignant", cc.n_malignant},
          {"min_area_cm2", cc.min_area_cm2},
          {"max_area_cm2", cc.max_area_cm2},
          {"benign", archetype_json(cc.benign)},
          {"malignant", archetype_json(cc.malignant)},
          {"jitter", archetype_json(cc.jitter)},
          {"size_noise", cc.size_noise},
          {"common_fraction", cc.common_fraction},
          {"uncommon_fraction", cc.uncommon_fraction},
          {"alpha_db_mhz_cm", cc.alpha_db_mhz_cm},
          {"frame",
           {{"n_lines", pg.n_lines},
            {"n_depth", pg.n_depth},
            {"fs_hz", pg.geometry.fs_hz},
            {"f0_hz", pg.geometry.f0_hz},
            {"axial_spacing_m", pg.geometry.axial_spacing_m},
            {"lateral_spacing_m", pg.geometry.lateral_spacing_m},
            {"speckle_bandwidth_hz", pg.speckle_bandwidth_hz},
            {"background_lambda", pg.background_lambda},
            {"background_b", pg.background_b},
            {"attenuation_zones", pg.attenuation_zones}}}}},
        {"hscan",
         {{"n_filters", c.analysis.n_filters},
          {"fmin_hz", c.analysis.fmin_hz},
          {"fmax_hz", c.analysis.fmax_hz},
          {"rel_bandwidth", c.analysis.rel_bandwidth}}},
        {"attenuation",
         {{"alpha_db_mhz_cm", c.analysis.attenuation.alpha_db_mhz_cm},
          {"n_zones", c.analysis.attenuation.n_zones},
          {"f0_hz", c.analysis.attenuation.f0_hz}}},
        {"bmode", {{"dynamic_range_db", c.analysis.dynamic_range_db}}},
        {"burr", {{"histogram_rate", c.analysis.features.histogram_rate}}},
        {"margins", {{"fraction", c.analysis.features.margin_fraction}}},
        {"svm",
         {{"tune", c.train.tune},
          {"c_grid", c.train.tuning.c_grid},
          {"gamma_grid", c.train.tuning.gamma_grid},
          {"folds", c.train.tuning.folds},
          {"c", c.train.svm.c},
          {"gamma", c.train.svm.gamma},
          {"tolerance", c.train.svm.tolerance},
          {"max_iterations", c.train.svm.max_iterations}}},
        {"selection", {{"enabled", c.selection.enabled}, {"scorer", std::string(to_string(c.selection.scorer))}}},
        {"eval",
         {{"repeats", c.eval.repeats},
          {"train_fraction", c.eval.train_fraction},
          {"thresholds_cm2", c.eval.thresholds_cm2}}},
        {"dsi",
         {{"median_k", c.dsi.median_k},
          {"gaussian_sigma", c.dsi.gaussian_sigma},
          {"opacity", c.dsi.opacity},
          {"lut_anchors", anchors}}},
    };
}

PipelineConfig config_from_json(const json& doc) {
    require(doc.is_object(), ErrorCode::config_error, "config must be a JSON object");
    const json defaults = config_to_json(PipelineConfig{});
    reject_unknown_keys(doc, defaults, "");
    json j = defaults;
    j.merge_patch(doc);
    try {
        PipelineConfig c;
        c.seed = j.at("seed").get<std::uint64_t>();
        c.scorer = parse_scorer(j.at("scorer").get<std::string>());
        c.jobs = std::max<std::size_t>(1, j.at("jobs").get<std::size_t>());
        const auto& p = j.at("paths");
        c.paths = {p.at("cohort_dir").get<std::string>(), p.at("features").get<std::string>(),
                   p.at("model").get<std::string>(), p.at("report_dir").get<std::string>()};

        const auto& cj = j.at("cohort");
        auto& cc = c.cohort;
        cc.n_benign = cj.at("n_benign").get<std::size_t>();
        cc.n_malignant = cj.at("n_malignant").get<std::size_t>();
        cc.min_area_cm2 = cj.at("min_area_cm2").get<double>();
        cc.max_area_cm2 = cj.at("max_area_cm2").get<double>();
        cc.benign = archetype_from(cj.at("benign"));
        cc.malignant = archetype_from(cj.at("malignant"));
        cc.jitter = archetype_from(cj.at("jitter"));
        cc.size_noise = cj.at("size_noise").get<double>();
        cc.common_fraction = cj.at("common_fraction").get<double>();
        cc.uncommon_fraction = cj.at("uncommon_fraction").get<double>();
        cc.alpha_db_mhz_cm = cj.at("alpha_db_mhz_cm").get<double>();
        const auto& fj = cj.at("frame");
        auto& pg = cc.geometry;
        pg.n_lines = fj.at("n_lines").get<std::size_t>();
        pg.n_depth = fj.at("n_depth").get<std::size_t>();
        pg.geometry.fs_hz = fj.at("fs_hz").get<double>();
        pg.geometry.f0_hz = fj.at("f0_hz").get<double>();
        pg.geometry.axial_spacing_m = fj.at("axial_spacing_m").get<double>();
        pg.geometry.lateral_spacing_m = fj.at("lateral_spacing_m").get<double>();
        pg.speckle_bandwidth_hz = fj.at("speckle_bandwidth_hz").get<double>();
        pg.background_lambda = fj.at("background_lambda").get<double>();
        pg.background_b = fj.at("background_b").get<double>();
        pg.attenuation_zones = fj.at("attenuation_zones").get<std::size_t>();
        cc.validate();

        auto& a = c.analysis;
        a.n_filters = j.at("hscan").at("n_filters").get<std::size_t>();
        a.fmin_hz = j.at("hscan").at("fmin_hz").get<double>();
        a.fmax_hz = j.at("hscan").at("fmax_hz").get<double>();
        a.rel_bandwidth = j.at("hscan").at("rel_bandwidth").get<double>();
        a.attenuation.alpha_db_mhz_cm = j.at("attenuation").at("alpha_db_mhz_cm").get<double>();
        a.attenuation.n_zones = j.at("attenuation").at("n_zones").get<std::size_t>();
        a.attenuation.f0_hz = j.at("attenuation").at("f0_hz").get<double>();
        a.dynamic_range_db = j.at("bmode").at("dynamic_range_db").get<double>();
        a.features.histogram_rate = j.at("burr").at("histogram_rate").get<double>();
        a.features.margin_fraction = j.at("margins").at("fraction").get<double>();

        const auto& sj = j.at("svm");
        c.train.tune = sj.at("tune").get<bool>();
        c.train.tuning.c_grid = sj.at("c_grid").get<std::vector<double>>();
        c.train.tuning.gamma_grid = sj.at("gamma_grid").get<std::vector<double>>();
        c.train.tuning.folds = sj.at("folds").get<std::size_t>();
        c.train.svm.c = sj.at("c").get<double>();
        c.train.svm.gamma = sj.at("gamma").get<double>();
        c.train.svm.tolerance = sj.at("tolerance").get<double>();
        c.train.svm.max_iterations = sj.at("max_iterations").get<std::size_t>();
        c.train.scorer = c.scorer;

        c.selection.enabled = j.at("selection").at("enabled").get<bool>();
        c.selection.scorer = parse_scorer(j.at("selection").at("scorer").get<std::string>());

        c.eval.repeats = j.at("eval").at("repeats").get<std::size_t>();
        c.eval.train_fraction = j.at("eval").at("train_fraction").get<double>();
        c.eval.thresholds_cm2 = j.at("eval").at("thresholds_cm2").get<std::vector<double>>();

        const auto& dj = j.at("dsi");
        c.dsi.median_k = dj.at("median_k").get<int>();
        c.dsi.gaussian_sigma = dj.at("gaussian_sigma").get<double>();
        c.dsi.opacity = dj.at("opacity").get<double>();
        c.dsi.lut_anchors.clear();
        for (const auto& aj : dj.at("lut_anchors")) {
            const auto rgb = aj.at("rgb").get<std::vector<int>>();
            require(rgb.size() == 3 && std::all_of(rgb.begin(), rgb.end(), [](int v) { return v >= 0 && v <= 255; }),
                    ErrorCode::config_error, "lut anchor rgb must be three values in 0..255");
            c.dsi.lut_anchors.push_back({aj.at("index").get<std::size_t>(),
                                         {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                                          static_cast<std::uint8_t>(rgb[2])}});
        }
        build_lut(c.dsi.lut_anchors);
        require(c.eval.repeats >= 1 && c.eval.train_fraction > 0.0 && c.eval.train_fraction < 1.0,
                ErrorCode::config_error, "eval needs repeats >= 1 and train_fraction in (0, 1)");
        require(c.dsi.opacity >= 0.0 && c.dsi.opacity <= 1.0, ErrorCode::config_error, "dsi.opacity must lie in [0, 1]");
        return c;
    } catch (const json::exception& e) {
        fail(ErrorCode::config_error, std::string("invalid config: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::config_error, std::string("invalid config: ") + e.what());
    }
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io_error, "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::config_error, "malformed config " + path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

std::string features_csv_header() {
    std::string h = "id,label,category,area_cm2";
    for (auto name : kFeatureNames) {
        h += ",";
        h += name;
    }
    return h;
}

std::string features_to_csv(const std::vector<FeatureRow>& rows) {
    std::string out = features_csv_header() + "\n";
    for (const auto& r : rows) {
        out += r.id + "," + std::string(to_string(r.label)) + "," + std::string(to_string(r.category)) + "," +
               format_double(r.area_cm2);
        for (double v : r.features.values) {
            out += "," + format_double(v);
        }
        out += "\n";
    }
    return out;
}

std::vector<FeatureRow> features_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::bad_schema, "empty feature table");
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    require(line == features_csv_header(), ErrorCode::bad_schema, "unexpected feature table header");
    std::vector<FeatureRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        require(f.size() == 4 + kFeatureCount, ErrorCode::bad_schema,
                "feature table line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
        FeatureRow r;
        try {
            r.id = f[0];
            r.label = parse_label(f[1]);
            r.category = parse_category(f[2]);
            r.area_cm2 = std::stod(f[3]);
            for (std::size_t k = 0; k < kFeatureCount; ++k) {
                r.features.values[k] = std::stod(f[4 + k]);
            }
        } catch (const std::invalid_argument&) {
            fail(ErrorCode::bad_schema, "non-numeric value on feature table line " + std::to_string(lineno));
        } catch (const std::out_of_range&) {
            fail(ErrorCode::bad_schema, "value out of range on feature table line " + std::to_string(lineno));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_features(const std::vector<FeatureRow>& rows, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io_error, "cannot write " + path.string());
    out << features_to_csv(rows);
    require(static_cast<bool>(out), ErrorCode::io_error, "short write to " + path.string());
}

std::vector<FeatureRow> read_features(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return features_from_csv(ss.str());
}

std::vector<FeatureRow> extract_cohort(const CohortManifest& manifest, const AnalysisOptions& options,
                                       std::size_t jobs, bool lenient, std::vector<std::string>& warnings) {
    const auto n = manifest.entries.size();
    std::vector<std::optional<FeatureRow>> rows(n);
    std::vector<std::string> errors(n);
    std::vector<ErrorCode> codes(n, ErrorCode::invalid_argument);
    detail::parallel_for(n, jobs, [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        try {
            const auto rf = read_frame(manifest.directory / e.rf_path);
            const auto mask = LesionMask::from_bits(read_mask(manifest.directory / e.mask_path),
                                                    rf.geometry.axial_spacing_m, rf.geometry.lateral_spacing_m);
            const auto analysis = analyze_frame(rf, mask, options);
            rows[i] = FeatureRow{e.id, e.label, e.category, mask.area_cm2(), analysis.features};
        } catch (const Error& err) {
            errors[i] = err.what();
            codes[i] = err.code();
        }
    });
    std::vector<FeatureRow> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i]) {
            out.push_back(std::move(*rows[i]));
            continue;
        }
        const std::string msg = manifest.entries[i].id + ": " + errors[i];
        if (!lenient) {
            throw Error(codes[i], msg);
        }
        warnings.push_back("skipped " + msg);
    }
    return out;
}

TrainOutcome train_pipeline(const std::vector<FeatureRow>& rows, const PipelineConfig& config,
                            bool default_features) {
    const auto labels = labels_of(rows);
    require_binary_labels(labels);

    TrainOutcome outcome;
    std::vector<Feature> chosen = default_feature_subset();
    if (!default_features && config.selection.enabled) {
        const auto candidates = candidate_features();
        std::vector<FeatureVector> fvs;
        for (const auto& r : rows) {
            fvs.push_back(r.features);
        }
        std::vector<Feature> all;
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            all.push_back(static_cast<Feature>(k));
        }
        const Matrix table = feature_table(fvs, all);
        std::vector<std::size_t> cand_cols;
        for (auto f : candidates) {
            cand_cols.push_back(index_of(f));
        }
        SelectOptions so;
        so.scorer = config.selection.scorer;
        so.svm.tolerance = config.train.svm.tolerance;
        so.svm.max_iterations = config.train.svm.max_iterations;
        so.jobs = config.jobs;
        auto sel = select_features(table, labels, cand_cols, so);
        chosen.clear();
        for (auto col : sel.best) {
            chosen.push_back(static_cast<Feature>(col));
        }
        outcome.warnings.insert(outcome.warnings.end(), sel.warnings.begin(), sel.warnings.end());
        outcome.selection = std::move(sel);
    }

    std::vector<FeatureVector> fvs;
    for (const auto& r : rows) {
        fvs.push_back(r.features);
    }
    TrainOptions options = config.train;
    options.scorer = config.scorer;
    options.tuning.seed = derive_seed(config.seed, hash_string("tune"));
    options.tuning.jobs = config.jobs;
    outcome.model = train_model(feature_table(fvs, chosen), labels, chosen, options, &outcome.report);
    outcome.warnings.insert(outcome.warnings.end(), outcome.report.tuning.warnings.begin(),
                            outcome.report.tuning.warnings.end());
    if (outcome.report.pca_rank_deficient) {
        outcome.warnings.push_back("rank-deficient feature covariance; PCA keeps positive-eigenvalue components only");
    }
    return outcome;
}

json selection_report(const TrainOutcome& outcome) {
    json features = json::array();
    for (auto f : outcome.model.features) {
        features.push_back(std::string(name_of(f)));
    }
    json report = {
        {"selected_features", features},
        {"svm", {{"c", outcome.model.svm.c}, {"gamma", outcome.model.svm.gamma}}},
        {"warnings", outcome.warnings},
    };
    json grid = json::array();
    for (const auto& gp : outcome.report.tuning.grid) {
        grid.push_back({{"c", gp.c},
                        {"gamma", gp.gamma},
                        {"cv_accuracy", gp.mean_accuracy},
                        {"std_error", gp.std_error},
                        {"failed", gp.failed}});
    }
    report["tuning_grid"] = grid;
    if (outcome.selection) {
        const auto& s = *outcome.selection;
        json subsets = json::array();
        for (const auto& ss : s.scored) {
            json names = json::array();
            for (auto c : ss.columns) {
                names.push_back(std::string(kFeatureNames[c]));
            }
            subsets.push_back({{"features", names}, {"auc", ss.auc}});
        }
        report["selection"] = {{"best_auc", s.best_auc},
                               {"n_enumerated", s.n_enumerated},
                               {"n_skipped", s.n_skipped},
                               {"subsets", subsets}};
    }
    return report;
}

std::vector<MetricRow> evaluate_rows(const std::vector<FeatureRow>& rows, const std::vector<Feature>& features,
                                     const PipelineConfig& config, std::vector<std::string>* warnings) {
    require(!features.empty(), ErrorCode::invalid_argument, "no features to evaluate");
    std::vector<MetricRow> report;
    const std::vector<std::pair<std::string, bool>> filters{{"all", false}, {"major", true}};
    const std::vector<Scorer> scorers{Scorer::pc1, Scorer::projection, Scorer::svm_distance};

    // per filter: one split plan, one model per repeat, all scorers from it
    std::vector<std::vector<std::vector<RepeatResult>>> results(filters.size());
    std::vector<std::vector<double>> areas(filters.size());
    std::vector<std::vector<int>> subset_labels(filters.size());
    for (std::size_t f = 0; f < filters.size(); ++f) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!filters[f].second || rows[i].category == Category::major) {
                members.push_back(i);
            }
        }
        std::vector<FeatureVector> fvs;
        for (auto i : members) {
            fvs.push_back(rows[i].features);
            areas[f].push_back(rows[i].area_cm2);
            subset_labels[f].push_back(label_sign(rows[i].label));
        }
        const Matrix table = feature_table(fvs, features);
        const auto& y = subset_labels[f];
        const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
        if (f > 0 && (n_pos < 4 || y.size() - n_pos < 4)) {
            // a category subset too small to stratify is reported as unavailable
            results[f].assign(scorers.size(), {});
            if (warnings != nullptr) {
                warnings->push_back("category filter '" + filters[f].first + "' has " + std::to_string(n_pos) +
                                    " malignant and " + std::to_string(y.size() - n_pos) +
                                    " benign lesions; need >= 4 each, rows marked unavailable");
            }
            continue;
        }
        const auto plan = make_splits(y, config.eval.repeats, config.eval.train_fraction,
                                      derive_seed(config.seed, hash_string("splits:" + filters[f].first)));
        std::vector<std::size_t> cols(features.size());
        std::iota(cols.begin(), cols.end(), 0);

        results[f].assign(scorers.size(), std::vector<RepeatResult>(plan.repeats));
        detail::parallel_for(plan.repeats, config.jobs, [&](std::size_t r) {
            const Matrix xtr = take(table, plan.train[r], cols);
            std::vector<int> ytr;
            for (auto i : plan.train[r]) {
                ytr.push_back(y[i]);
            }
            TrainOptions options = config.train;
            options.tuning.seed = derive_seed(config.seed, hash_string("tune:" + filters[f].first) + r);
            options.tuning.jobs = 1;
            const auto model = train_model(xtr, ytr, features, options);
            for (std::size_t s = 0; s < scorers.size(); ++s) {
                RepeatResult& rr = results[f][s][r];
                rr.train = plan.train[r];
                rr.test = plan.test[r];
                for (auto i : rr.train) {
                    rr.train_scores.push_back(score_with(model, scorers[s], table.row(static_cast<Eigen::Index>(i)).transpose()));
                }
                for (auto i : rr.test) {
                    rr.test_scores.push_back(score_with(model, scorers[s], table.row(static_cast<Eigen::Index>(i)).transpose()));
                }
            }
        });
    }
    for (std::size_t s = 0; s < scorers.size(); ++s) {
        for (std::size_t f = 0; f < filters.size(); ++f) {
            auto rows_out = size_threshold_sweep(areas[f], subset_labels[f], results[f][s], config.eval.thresholds_cm2,
                                                 std::string(to_string(scorers[s])), filters[f].first);
            report.insert(report.end(), rows_out.begin(), rows_out.end());
        }
    }
    return report;
}

RenderOutcome render_frame(const RfFrame& rf, const LesionMask& mask, const TrainedModel& model, Scorer scorer,
                           const PipelineConfig& config) {
    RenderOutcome out;
    out.analysis = analyze_frame(rf, mask, config.analysis);
    out.raw = local_score_map(out.analysis.levels, out.analysis.features, model, mask, scorer);
    out.smoothed = smooth(out.raw, config.dsi.median_k, config.dsi.gaussian_sigma);
    const auto& limits = model.limits_for(scorer);
    out.scale = make_scale(limits.lo, limits.hi);
    out.scale.lut = build_lut(config.dsi.lut_anchors);
    out.image = render_overlay(out.analysis.bmode, out.smoothed, mask, out.scale, config.dsi.opacity);

    json anchors = json::array();
    for (const auto& a : config.dsi.lut_anchors) {
        anchors.push_back({{"index", a.index}, {"rgb", {a.color.r, a.color.g, a.color.b}}});
    }
    const auto global = score(model, feature_columns(out.analysis.features, model.features));
    out.provenance = {
        {"scorer", std::string(to_string(scorer))},
        {"scale", {{"lo", out.scale.lo}, {"hi", out.scale.hi}}},
        {"smoothing", {{"median_k", config.dsi.median_k}, {"gaussian_sigma", config.dsi.gaussian_sigma}}},
        {"opacity", config.dsi.opacity},
        {"lut_anchors", anchors},
        {"global_score", global.get(scorer)},
        {"svm_sign", global.svm_sign},
        {"mean_lut_index", mean_hue_index(out.smoothed, out.scale)},
        {"width", out.image.width},
        {"height", out.image.height},
    };
    return out;
}

}  // namespace qus
