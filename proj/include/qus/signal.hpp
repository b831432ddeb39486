#pragma once

#include <cstddef>
#include <cstdint>

#include "qus/grid.hpp"

namespace qus {

/// Acquisition geometry shared by every grid derived from one RF frame.
struct Geometry {
    double fs_hz = 40e6;
    double f0_hz = 9.4e6;
    double axial_spacing_m = 1540.0 / (2.0 * 40e6);
    double lateral_spacing_m = 2e-4;

    bool operator==(const Geometry&) const = default;
};

inline constexpr std::size_t kMinDepthSamples = 64;

/// Raw RF samples, one row per scanline.
struct RfFrame {
    Grid<double> samples;
    Geometry geometry;

    /// Throws on n_lines < 1, n_depth < 64, fs <= 2 f0, non-positive spacing
    /// or any non-finite sample.
    void validate() const;
};

struct EnvelopeFrame {
    Grid<double> samples;
    Geometry geometry;
};

struct BModeImage {
    Grid<double> pixels;
    double dynamic_range_db = 60.0;
};

/// Validated lesion region: non-empty and one 8-connected component.
class LesionMask {
public:
    LesionMask() = default;

    static LesionMask from_bits(BinaryImage bits, double axial_spacing_m,
                                double lateral_spacing_m);

    const BinaryImage& bits() const noexcept { return bits_; }
    std::size_t pixel_count() const noexcept { return count_; }
    double area_cm2() const noexcept;
    double axial_spacing_m() const noexcept { return axial_; }
    double lateral_spacing_m() const noexcept { return lateral_; }
    bool contains(std::size_t line, std::size_t sample) const { return bits_(line, sample) != 0; }

private:
    BinaryImage bits_;
    std::size_t count_ = 0;
    double axial_ = 0.0;
    double lateral_ = 0.0;
};

/// Per-scanline magnitude of the analytic signal (full-length DFT, no window).
EnvelopeFrame demodulate_envelope(const RfFrame& rf);

/// pixel = clamp(1 + 20 log10(env / env_max) / DR, 0, 1); zero envelope maps to 0.
BModeImage log_compress(const EnvelopeFrame& env, double dynamic_range_db = 60.0);

std::size_t count_set(const BinaryImage& image);

/// Number of 8-connected foreground components.
std::size_t count_components(const BinaryImage& image);

/// Keeps only the largest 8-connected component (lowest-index wins ties).
BinaryImage largest_component(const BinaryImage& image);

}  // namespace qus
