#include "qus/features.hpp"

#include <string>

#include "qus/burr.hpp"
#include "qus/error.hpp"
#include "qus/region.hpp"

namespace qus {
namespace {

template <typename Fn>
auto with_feature_context(std::string_view feature, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(feature) + ": " + e.what());
    }
}

}  // namespace

std::optional<Feature> parse_feature(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) {
            return static_cast<Feature>(i);
        }
    }
    return std::nullopt;
}

std::vector<Feature> default_feature_subset() {
    return {Feature::hscan_color_level, Feature::boundary_roughness, Feature::bscan_std,
            Feature::bscan_boundary_std, Feature::burr_b};
}

std::vector<Feature> candidate_features() {
    std::vector<Feature> out;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (static_cast<Feature>(i) != Feature::reserve) {
            out.push_back(static_cast<Feature>(i));
        }
    }
    return out;
}

FeatureVector extract_features(const EnvelopeFrame& envelope, const BModeImage& bmode, const ColorLevelMap& levels,
                               const LesionMask& mask, const FeatureOptions& options) {
    require(envelope.samples.same_shape(mask.bits()) && bmode.pixels.same_shape(mask.bits()) &&
                levels.same_shape(mask.bits()),
            ErrorCode::shape_mismatch, "feature inputs are not aligned to one frame");
    FeatureVector fv;

    with_feature_context("hscan_color_level", [&] {
        fv[Feature::hscan_color_level] = lesion_color_level(levels, mask);
        fv[Feature::hscan_std] = lesion_color_level_std(levels, mask);
    });

    with_feature_context("boundary_roughness", [&] {
        fv[Feature::boundary_roughness] = convex_hull(mask).roughness;
    });

    with_feature_context("bscan_mean", [&] {
        const auto st = region_stats(bmode, mask.bits());
        fv[Feature::bscan_mean] = st.mean;
        fv[Feature::bscan_std] = st.std;
    });

    with_feature_context("bscan_boundary_mean", [&] {
        const auto m = margins(mask, options.margin_fraction);
        const auto st = region_stats(bmode, m.combined);
        fv[Feature::bscan_boundary_mean] = st.mean;
        fv[Feature::bscan_boundary_std] = st.std;
    });

    with_feature_context("burr_b", [&] {
        std::vector<double> amplitudes;
        amplitudes.reserve(mask.pixel_count());
        for (std::size_t i = 0; i < envelope.samples.size(); ++i) {
            if (mask.bits().data()[i] != 0) {
                amplitudes.push_back(envelope.samples.data()[i]);
            }
        }
        const auto fit = fit_burr(build_histogram(amplitudes, options.histogram_rate));
        fv[Feature::burr_lambda] = fit.lambda_hat;
        fv[Feature::burr_b] = fit.b_hat;
    });

    fv[Feature::reserve] = 0.0;
    return fv;
}

FrameAnalysis analyze_frame(const RfFrame& rf, const LesionMask& mask, const AnalysisOptions& options) {
    require(rf.samples.same_shape(mask.bits()), ErrorCode::shape_mismatch, "mask does not match the RF frame");
    FrameAnalysis a;
    a.corrected = correct_attenuation(rf, options.attenuation);
    a.envelope = demodulate_envelope(a.corrected);
    a.bmode = log_compress(a.envelope, options.dynamic_range_db);
    const auto bank = build_filter_bank(options.n_filters, options.fmin_hz, options.fmax_hz, options.rel_bandwidth);
    a.levels = color_level_map(a.corrected, bank);
    a.features = extract_features(a.envelope, a.bmode, a.levels, mask, options.features);
    return a;
}

}  // namespace qus
