// Command-line driver: synth, extract, train, eval, render, config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qus/error.hpp"
#include "qus/frame_io.hpp"
#include "qus/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    bool lenient = false;
};

qus::PipelineConfig resolve_config(const GlobalFlags& g) {
    qus::PipelineConfig c = g.config.empty() ? qus::PipelineConfig{} : qus::load_config(g.config);
    if (g.seed) {
        c.seed = *g.seed;
    }
    if (g.jobs) {
        c.jobs = std::max<std::size_t>(1, *g.jobs);
    }
    return c;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    qus::require(static_cast<bool>(out), qus::ErrorCode::io_error, "cannot write " + path.string());
    out << text;
    qus::require(static_cast<bool>(out), qus::ErrorCode::io_error, "short write to " + path.string());
}

qus::TrainedModel require_model(const fs::path& path) {
    qus::require(fs::exists(path), qus::ErrorCode::config_error, "model not found: " + path.string());
    return qus::load_model(path);
}

void warn_all(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantitative ultrasound lesion analysis pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--config", g.config, "JSON config file (defaults apply to omitted keys)");
    app.add_option("--seed", g.seed, "Seed overriding the config");
    app.add_option("--jobs", g.jobs, "Worker threads");
    app.add_flag("--lenient", g.lenient, "Skip unreadable lesions with a warning instead of failing");

    auto* synth = app.add_subcommand("synth", "Synthesize a phantom cohort");
    std::string synth_out;
    std::optional<std::size_t> n_benign;
    std::optional<std::size_t> n_malignant;
    std::optional<double> size_noise;
    synth->add_option("--out", synth_out, "Cohort directory (default: paths.cohort_dir)");
    synth->add_option("--benign", n_benign, "Number of benign lesions");
    synth->add_option("--malignant", n_malignant, "Number of malignant lesions");
    synth->add_option("--size-noise", size_noise, "Feature jitter multiplier for small lesions");

    auto* extract = app.add_subcommand("extract", "Extract lesion features from a cohort manifest");
    std::string manifest_path;
    std::string extract_out;
    extract->add_option("--manifest", manifest_path, "manifest.jsonl (default: <cohort_dir>/manifest.jsonl)");
    extract->add_option("--out", extract_out, "Feature CSV (default: paths.features)");

    auto* train = app.add_subcommand("train", "Select features and train the scoring model");
    std::string train_table;
    std::string train_out;
    std::string train_report;
    std::string feature_mode;
    train->add_option("--table", train_table, "Feature CSV (default: paths.features)");
    train->add_option("--out", train_out, "Model JSON (default: paths.model)");
    train->add_option("--report", train_report, "Selection report JSON (default: <report_dir>/selection.json)");
    train->add_option("--features", feature_mode, "'all' skips selection and uses the five default features")
        ->check(CLI::IsMember({"all"}));

    auto* eval = app.add_subcommand("eval", "Repeated-split evaluation over scorers, categories and size thresholds");
    std::string eval_table;
    std::string eval_model;
    std::string eval_out;
    eval->add_option("--table", eval_table, "Feature CSV (default: paths.features)");
    eval->add_option("--model", eval_model, "Model JSON whose feature subset is evaluated (default: paths.model)");
    eval->add_option("--out-dir", eval_out, "Report directory (default: paths.report_dir)");

    auto* render = app.add_subcommand("render", "Render a DSI overlay for one frame");
    std::string frame_path;
    std::string mask_path;
    std::string render_model;
    std::string render_out;
    std::string scorer_name;
    render->add_option("--frame", frame_path, "RF payload (.rf with .rf.json sidecar)")->required();
    render->add_option("--mask", mask_path, "Lesion mask PGM")->required();
    render->add_option("--model", render_model, "Model JSON (default: paths.model)");
    render->add_option("--out", render_out, "Overlay PNG; provenance goes to <out>.json")->required();
    render->add_option("--scorer", scorer_name, "Color-intensity source")
        ->check(CLI::IsMember({"pc1", "projection", "svm_distance"}));

    auto* config = app.add_subcommand("config", "Inspect configuration");
    bool print_defaults = false;
    config->add_flag("--print-defaults", print_defaults, "Print the full default config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitDomain;
    }

    try {
        if (config->parsed()) {
            if (print_defaults) {
                std::cout << qus::config_to_json(qus::PipelineConfig{}).dump(2) << '\n';
                return kExitOk;
            }
            // without --print-defaults, show the effective config
            std::cout << qus::config_to_json(resolve_config(g)).dump(2) << '\n';
            return kExitOk;
        }

        auto cfg = resolve_config(g);

        if (synth->parsed()) {
            if (n_benign) cfg.cohort.n_benign = *n_benign;
            if (n_malignant) cfg.cohort.n_malignant = *n_malignant;
            if (size_noise) cfg.cohort.size_noise = *size_noise;
            const fs::path out = synth_out.empty() ? cfg.paths.cohort_dir : fs::path(synth_out);
            const auto manifest = qus::synth_cohort(cfg.cohort, cfg.seed, out, cfg.jobs);
            std::cout << "synthesized " << manifest.entries.size() << " lesions into " << out.string() << '\n';
            return kExitOk;
        }

        if (extract->parsed()) {
            const fs::path mpath = manifest_path.empty() ? cfg.paths.cohort_dir / "manifest.jsonl" : fs::path(manifest_path);
            const auto manifest = qus::read_manifest(mpath);
            std::vector<std::string> warnings;
            const auto rows = qus::extract_cohort(manifest, cfg.analysis, cfg.jobs, g.lenient, warnings);
            warn_all(warnings);
            const fs::path out = extract_out.empty() ? cfg.paths.features : fs::path(extract_out);
            write_text(out, qus::features_to_csv(rows));
            std::cout << "extracted " << rows.size() << " of " << manifest.entries.size() << " lesions into "
                      << out.string() << '\n';
            return kExitOk;
        }

        if (train->parsed()) {
            const auto rows = qus::read_features(train_table.empty() ? cfg.paths.features : fs::path(train_table));
            const auto outcome = qus::train_pipeline(rows, cfg, feature_mode == "all");
            warn_all(outcome.warnings);
            const fs::path out = train_out.empty() ? cfg.paths.model : fs::path(train_out);
            if (out.has_parent_path()) {
                fs::create_directories(out.parent_path());
            }
            qus::save_model(outcome.model, out);
            const fs::path rpath = train_report.empty() ? cfg.paths.report_dir / "selection.json" : fs::path(train_report);
            write_text(rpath, qus::selection_report(outcome).dump(2) + "\n");
            std::cout << "selected:";
            for (auto f : outcome.model.features) {
                std::cout << ' ' << qus::name_of(f);
            }
            std::cout << "\nC=" << outcome.model.svm.c << " gamma=" << outcome.model.svm.gamma << "\nmodel written to "
                      << out.string() << '\n';
            return kExitOk;
        }

        if (eval->parsed()) {
            const auto rows = qus::read_features(eval_table.empty() ? cfg.paths.features : fs::path(eval_table));
            const auto model = require_model(eval_model.empty() ? cfg.paths.model : fs::path(eval_model));
            std::vector<std::string> warnings;
            const auto report = qus::evaluate_rows(rows, model.features, cfg, &warnings);
            warn_all(warnings);
            const fs::path dir = eval_out.empty() ? cfg.paths.report_dir : fs::path(eval_out);
            write_text(dir / "metrics.json", qus::report_to_json(report).dump(2) + "\n");
            write_text(dir / "metrics.csv", qus::report_to_csv(report));
            for (const auto& r : report) {
                if (r.threshold_cm2 == 0.0) {
                    std::printf("%-12s %-5s AUC %.3f +- %.3f  acc %.3f  sens %.3f  spec %.3f\n", r.scorer.c_str(),
                                r.category_filter.c_str(), r.auc.mean, r.auc.std, r.accuracy.mean,
                                r.sensitivity.mean, r.specificity.mean);
                }
            }
            std::cout << report.size() << " report rows written to " << dir.string() << '\n';
            return kExitOk;
        }

        if (render->parsed()) {
            const auto model = require_model(render_model.empty() ? cfg.paths.model : fs::path(render_model));
            const auto scorer = scorer_name.empty() ? model.scorer : qus::parse_scorer(scorer_name);
            const auto rf = qus::read_frame(frame_path);
            const auto mask = qus::LesionMask::from_bits(qus::read_mask(mask_path), rf.geometry.axial_spacing_m,
                                                         rf.geometry.lateral_spacing_m);
            const auto result = qus::render_frame(rf, mask, model, scorer, cfg);
            const fs::path out(render_out);
            if (out.has_parent_path()) {
                fs::create_directories(out.parent_path());
            }
            qus::write_png(result.image, out);
            auto prov = result.provenance;
            prov["frame"] = frame_path;
            prov["mask"] = mask_path;
            write_text(qus::sidecar_path(out), prov.dump(2) + "\n");
            std::cout << "overlay written to " << out.string() << '\n';
            return kExitOk;
        }
    } catch (const qus::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == qus::ErrorCode::io_error ? kExitIo : kExitDomain;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitDomain;
}
