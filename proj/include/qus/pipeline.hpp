#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qus/dsi.hpp"
#include "qus/eval.hpp"
#include "qus/features.hpp"
#include "qus/model.hpp"
#include "qus/phantom.hpp"

namespace qus {

struct PipelinePaths {
    std::filesystem::path cohort_dir = "cohort";
    std::filesystem::path features = "features.csv";
    std::filesystem::path model = "model.json";
    std::filesystem::path report_dir = "report";
};

struct SelectionConfig {
    bool enabled = true;
    Scorer scorer = Scorer::svm_distance;
};

struct EvalConfig {
    std::size_t repeats = 5;
    double train_fraction = 0.7;
    std::vector<double> thresholds_cm2 = default_size_thresholds();
};

struct DsiConfig {
    int median_k = 3;
    double gaussian_sigma = 1.0;
    double opacity = 0.6;
    std::vector<LutAnchor> lut_anchors = default_lut_anchors();
};

struct PipelineConfig {
    std::uint64_t seed = 1;
    Scorer scorer = Scorer::svm_distance;
    PipelinePaths paths;
    CohortConfig cohort;
    AnalysisOptions analysis;
    TrainOptions train;
    SelectionConfig selection;
    EvalConfig eval;
    DsiConfig dsi;
    std::size_t jobs = 1;
};

nlohmann::json config_to_json(const PipelineConfig& config);
/// Overlays `doc` on the defaults. Unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);

struct FeatureRow {
    std::string id;
    Label label = Label::benign;
    Category category = Category::major;
    double area_cm2 = 0.0;
    FeatureVector features;
};

inline int label_sign(Label l) { return l == Label::malignant ? 1 : -1; }

/// id, label, category, area_cm2, then the ten features in declaration order.
std::string features_csv_header();
std::string features_to_csv(const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> features_from_csv(const std::string& text);
void write_features(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_features(const std::filesystem::path& path);

/// Analyzes every manifest entry, in manifest order. With `lenient`, entries
/// that fail are dropped and described in `warnings`; otherwise the first
/// failure (lowest index) is rethrown.
std::vector<FeatureRow> extract_cohort(const CohortManifest& manifest, const AnalysisOptions& options,
                                       std::size_t jobs, bool lenient, std::vector<std::string>& warnings);

struct TrainOutcome {
    TrainedModel model;
    TrainReport report;
    std::optional<SelectionResult> selection;
    std::vector<std::string> warnings;
};

/// Feature selection over the nine extractable features (unless disabled or
/// `default_features` is set), then model training on the chosen subset.
TrainOutcome train_pipeline(const std::vector<FeatureRow>& rows, const PipelineConfig& config,
                            bool default_features);

nlohmann::json selection_report(const TrainOutcome& outcome);

/// Scorer x category filter (all, major) x size threshold grid. Each split
/// repeat trains a fresh model on `features` and scores its test rows. A
/// major-only subset with fewer than 4 lesions in a class yields unavailable
/// rows and a warning; the full cohort must stratify.
std::vector<MetricRow> evaluate_rows(const std::vector<FeatureRow>& rows, const std::vector<Feature>& features,
                                     const PipelineConfig& config, std::vector<std::string>* warnings = nullptr);

struct RenderOutcome {
    FrameAnalysis analysis;
    ScoreMap raw;
    ScoreMap smoothed;
    ColorScale scale;
    RgbImage image;
    nlohmann::json provenance;
};

RenderOutcome render_frame(const RfFrame& rf, const LesionMask& mask, const TrainedModel& model, Scorer scorer,
                           const PipelineConfig& config);

}  // namespace qus
