#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qus/signal.hpp"

namespace qus {

enum class Label { benign, malignant };
enum class Category { major, common, uncommon };

std::string_view to_string(Label label);
std::string_view to_string(Category category);
Label parse_label(std::string_view text);
Category parse_category(std::string_view text);

/// Ground truth for one synthetic lesion. Axes are in pixels: `semi_axis_lines`
/// across scanlines, `semi_axis_samples` along depth.
struct LesionSpec {
    Label label = Label::benign;
    double center_line = 0.0;
    double center_sample = 0.0;
    double semi_axis_lines = 10.0;
    double semi_axis_samples = 10.0;
    double roughness_amp = 0.0;  // radial perturbation fraction, [0, 0.5]
    int roughness_lobes = 5;     // >= 3
    double roughness_phase = 0.0;
    double scatterer_freq_hz = 9.4e6;
    double burr_lambda = 1.0;
    double burr_b = 3.0;
    double contrast_db = 0.0;  // lesion envelope scale = burr_lambda * 10^(contrast_db / 20)

    void validate() const;
};

/// Frame layout and background tissue for synthesized frames.
struct PhantomGeometry {
    std::size_t n_lines = 144;
    std::size_t n_depth = 1024;
    Geometry geometry{};
    /// Standard deviation of the Gaussian baseband speckle spectrum.
    double speckle_bandwidth_hz = 2.0e6;
    double background_lambda = 1.0;
    double background_b = 3.5;
    std::size_t attenuation_zones = 10;
};

/// i.i.d. draws by inverse CDF, A = lambda * sqrt(u^(1/(1-b)) - 1).
std::vector<double> sample_burr(double lambda, double b, std::size_t n, std::uint64_t seed);

/// Perturbed ellipse r(theta) = r0(theta) * (1 + amp * sin(lobes * theta + phase)),
/// reduced to its largest 8-connected component.
BinaryImage rasterize_lesion(const LesionSpec& spec, std::size_t n_lines, std::size_t n_depth);

struct PhantomFrame {
    RfFrame rf;
    LesionMask mask;
};

/// Background and lesion carry Burr-distributed envelopes on carriers at f0 and
/// the lesion scatterer frequency. Speckle is a band-limited complex Gaussian
/// field whose Rayleigh envelope is mapped through the Burr quantile function,
/// so envelope values follow the requested Burr law exactly while keeping a
/// narrowband spectrum. Depth attenuation (alpha dB/MHz/cm) is applied last and
/// samples are rounded to float32 precision.
PhantomFrame synth_lesion_frame(const LesionSpec& spec, const PhantomGeometry& geometry,
                                double alpha_db_mhz_cm, std::uint64_t seed);

struct ArchetypeParams {
    double roughness_amp = 0.0;
    double scatterer_freq_mhz = 9.4;
    double burr_b = 3.0;
    double contrast_db = 0.0;
};

struct CohortConfig {
    std::size_t n_benign = 40;
    std::size_t n_malignant = 40;
    double min_area_cm2 = 0.08;
    double max_area_cm2 = 1.3;
    ArchetypeParams benign{0.02, 10.4, 2.6, -2.0};
    ArchetypeParams malignant{0.24, 8.0, 4.2, -9.0};
    /// Per-entry Gaussian jitter (standard deviations) applied to each archetype field.
    ArchetypeParams jitter{0.03, 0.5, 0.3, 1.5};
    /// Jitter multiplier 1 + size_noise * 0.5 cm^2 / area; > 0 makes small lesions noisier.
    double size_noise = 0.0;
    /// Fractions of each class drawn as common / uncommon presentations; these are
    /// pulled 25% / 50% toward the opposite archetype. The rest are major.
    double common_fraction = 0.2;
    double uncommon_fraction = 0.1;
    double alpha_db_mhz_cm = 1.0;
    PhantomGeometry geometry{};

    void validate() const;
};

struct CohortEntry {
    std::string id;
    std::string rf_path;    // relative to the manifest directory
    std::string mask_path;  // relative to the manifest directory
    Label label = Label::benign;
    Category category = Category::major;
    double area_cm2 = 0.0;
    LesionSpec truth;
};

struct CohortManifest {
    std::vector<CohortEntry> entries;
    std::uint64_t seed = 0;
    std::filesystem::path directory;
};

inline constexpr const char* kCohortSchema = "cohort-v1";

/// Deterministic per-entry lesion specs; entry i draws from stream (seed, id).
std::vector<CohortEntry> plan_cohort(const CohortConfig& config, std::uint64_t seed);

/// Synthesizes every entry into `out_dir` (frames, masks, manifest.jsonl).
CohortManifest synth_cohort(const CohortConfig& config, std::uint64_t seed,
                            const std::filesystem::path& out_dir, std::size_t jobs = 1);

void write_manifest(const CohortManifest& manifest, const std::filesystem::path& path);
CohortManifest read_manifest(const std::filesystem::path& path);

}  // namespace qus
