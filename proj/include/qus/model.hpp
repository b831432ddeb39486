#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qus/features.hpp"
#include "qus/ml.hpp"
#include "qus/selection.hpp"
#include "qus/svm.hpp"

namespace qus {

inline constexpr const char* kModelSchema = "model-v1";

struct ScoreLimits {
    double lo = 0.0;
    double hi = 1.0;
};

struct MalignancyScore {
    double pc1 = 0.0;
    double projection = 0.0;
    double svm_distance = 0.0;
    int svm_sign = 1;

    double get(Scorer scorer) const;
};

/// Everything needed to score a raw feature vector restricted to `features`.
struct TrainedModel {
    std::vector<Feature> features;
    Standardizer standardizer;
    PcaModel pca;
    Vector reference;
    SvmModel svm;
    std::array<ScoreLimits, 3> limits{};  // indexed by Scorer, from training scores
    Scorer scorer = Scorer::svm_distance;

    const ScoreLimits& limits_for(Scorer s) const { return limits[static_cast<std::size_t>(s)]; }
};

struct TrainOptions {
    bool tune = true;
    TuneOptions tuning{};
    /// Used when `tune` is false.
    SvmParams svm{};
    Scorer scorer = Scorer::svm_distance;
};

struct TrainReport {
    TuneResult tuning;
    bool pca_rank_deficient = false;
};

/// Raw (unstandardized) feature values for `features`, in that order.
Vector feature_columns(const FeatureVector& fv, std::span<const Feature> features);
Matrix feature_table(std::span<const FeatureVector> rows, std::span<const Feature> features);

/// Fits the standardizer, PCA, reference direction and SVM on `raw` rows.
TrainedModel train_model(const Matrix& raw, std::span<const int> labels, std::vector<Feature> features,
                         const TrainOptions& options, TrainReport* report = nullptr);

MalignancyScore score(const TrainedModel& model, const Vector& raw);
double score_with(const TrainedModel& model, Scorer scorer, const Vector& raw);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace qus
