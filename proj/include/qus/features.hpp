#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qus/hscan.hpp"
#include "qus/signal.hpp"

namespace qus {

enum class Feature : std::size_t {
    hscan_color_level,
    hscan_std,
    boundary_roughness,
    bscan_mean,
    bscan_std,
    bscan_boundary_mean,
    bscan_boundary_std,
    burr_lambda,
    burr_b,
    reserve,
};

inline constexpr std::size_t kFeatureCount = 10;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "hscan_color_level", "hscan_std",   "boundary_roughness", "bscan_mean", "bscan_std",
    "bscan_boundary_mean", "bscan_boundary_std", "burr_lambda", "burr_b",     "reserve",
};

constexpr std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }
constexpr std::string_view name_of(Feature f) { return kFeatureNames[index_of(f)]; }
std::optional<Feature> parse_feature(std::string_view name);

/// H-scan color level, boundary roughness, B-scan STD, B-scan boundary STD, Burr b.
std::vector<Feature> default_feature_subset();
/// Every extractable feature except the reserve slot.
std::vector<Feature> candidate_features();

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double& operator[](Feature f) { return values[index_of(f)]; }
    double operator[](Feature f) const { return values[index_of(f)]; }
};

struct FeatureOptions {
    double histogram_rate = 0.10;
    double margin_fraction = 0.10;
};

/// Computes all lesion features. The reserve slot is always 0.
FeatureVector extract_features(const EnvelopeFrame& envelope, const BModeImage& bmode,
                               const ColorLevelMap& levels, const LesionMask& mask,
                               const FeatureOptions& options = {});

struct AnalysisOptions {
    std::size_t n_filters = kDefaultFilterCount;
    double fmin_hz = kDefaultFminHz;
    double fmax_hz = kDefaultFmaxHz;
    double rel_bandwidth = kDefaultRelBandwidth;
    AttenuationSpec attenuation{};
    double dynamic_range_db = 60.0;
    FeatureOptions features{};
};

struct FrameAnalysis {
    RfFrame corrected;
    EnvelopeFrame envelope;
    BModeImage bmode;
    ColorLevelMap levels;
    FeatureVector features;
};

/// Attenuation correction, envelope, log compression, H-scan and feature
/// extraction for one frame. Every product derives from the corrected frame.
FrameAnalysis analyze_frame(const RfFrame& rf, const LesionMask& mask, const AnalysisOptions& options = {});

}  // namespace qus
