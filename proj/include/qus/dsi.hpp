#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qus/features.hpp"
#include "qus/hscan.hpp"
#include "qus/ml.hpp"
#include "qus/signal.hpp"

namespace qus {

struct TrainedModel;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

struct LutAnchor {
    std::size_t index = 0;
    Rgb color;
};

using Lut = std::array<Rgb, 256>;

/// light blue (0) -> green (64) -> yellow (160) -> red (255)
std::vector<LutAnchor> default_lut_anchors();

/// Piecewise-linear RGB interpolation between anchors. The first anchor must
/// sit at 0 and the last at 255, with strictly increasing indices.
Lut build_lut(std::span<const LutAnchor> anchors);

/// HSV hue in degrees, [0, 360).
double hue_degrees(const Rgb& c);

struct ColorScale {
    double lo = 0.0;
    double hi = 1.0;
    Lut lut = build_lut(default_lut_anchors());
};

ColorScale make_scale(double lo, double hi);

/// lo/hi at the 2.5th/97.5th percentiles (linear interpolation between order
/// statistics). Equal limits are widened by 1e-6 on each side.
ColorScale calibrate_scale(std::span<const double> training_scores);

/// round(clamp((value - lo) / (hi - lo), 0, 1) * 255) with halves rounded up.
std::size_t score_to_index(double value, const ColorScale& scale);
Rgb score_to_color(double value, const ColorScale& scale);

/// Values are defined on mask pixels and NaN elsewhere.
struct ScoreMap {
    Grid<double> values;
    BinaryImage mask;
    Scorer scorer = Scorer::svm_distance;
};

/// Scores each mask pixel with the lesion's global features, except that
/// hscan_color_level takes the pixel's own level.
ScoreMap local_score_map(const ColorLevelMap& levels, const FeatureVector& global, const TrainedModel& model,
                         const LesionMask& mask, Scorer scorer);

/// Mask-restricted median (lower middle for even counts) followed by a
/// Gaussian whose weights are renormalized over in-mask neighbors.
ScoreMap smooth(const ScoreMap& map, int median_k = 3, double gaussian_sigma = 1.0);

/// Interleaved 8-bit RGB; x = scanline, y = depth sample.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data;

    Rgb at(std::size_t x, std::size_t y) const;
    bool operator==(const RgbImage&) const = default;
};

RgbImage render_overlay(const BModeImage& bmode, const ScoreMap& map, const LesionMask& mask,
                        const ColorScale& scale, double opacity = 0.6);

/// Mean LUT index over mask pixels.
double mean_hue_index(const ScoreMap& map, const ColorScale& scale);

void write_png(const RgbImage& image, const std::filesystem::path& path);

}  // namespace qus
