#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qus/grid.hpp"
#include "qus/signal.hpp"

namespace qus {

/// Gaussian band-pass filters with uniformly spaced peak frequencies.
/// Filter k has gain exp(-(f - peak_k)^2 / (2 sigma_k^2)), sigma_k = rel_bandwidth * peak_k.
struct FilterBank {
    std::vector<double> peak_hz;
    double rel_bandwidth = 0.10;

    std::size_t size() const noexcept { return peak_hz.size(); }
    double sigma_hz(std::size_t k) const { return rel_bandwidth * peak_hz.at(k); }
    double gain(std::size_t k, double f_hz) const;
};

inline constexpr std::size_t kDefaultFilterCount = 256;
inline constexpr double kDefaultFminHz = 5.2e6;
inline constexpr double kDefaultFmaxHz = 12.4e6;
inline constexpr double kDefaultRelBandwidth = 0.10;

FilterBank build_filter_bank(std::size_t n = kDefaultFilterCount, double fmin_hz = kDefaultFminHz,
                             double fmax_hz = kDefaultFmaxHz, double rel_bandwidth = kDefaultRelBandwidth);

struct AttenuationSpec {
    double alpha_db_mhz_cm = 1.0;
    std::size_t n_zones = 10;
    /// Transmit center frequency; recorded for provenance, the gain itself is
    /// evaluated at every spectral bin.
    double f0_hz = 9.4e6;
};

struct DepthZone {
    std::size_t start = 0;
    std::size_t length = 0;
    double mean_depth_cm = 0.0;
};

/// Contiguous equal bands over depth; the last band absorbs the remainder.
std::vector<DepthZone> depth_zones(std::size_t n_depth, std::size_t n_zones, double axial_spacing_m);

/// Multiplies each zone's spectrum by 10^(alpha * f_MHz * x_z / 20).
RfFrame correct_attenuation(const RfFrame& rf, const AttenuationSpec& spec);

/// Exact inverse of correct_attenuation (gain 10^(-alpha * f_MHz * x_z / 20)).
RfFrame apply_attenuation(const RfFrame& rf, const AttenuationSpec& spec);

/// Per-sample index (1-based) of the filter whose analytic output has the
/// largest magnitude.
using ColorLevelMap = Grid<std::uint16_t>;

/// Responses within this relative distance of the maximum count as ties and
/// resolve to the lowest filter index.
inline constexpr double kColorLevelTieTolerance = 1e-12;

ColorLevelMap color_level_map(const RfFrame& rf, const FilterBank& bank);

/// Mean color level over the mask.
double lesion_color_level(const ColorLevelMap& map, const LesionMask& mask);
/// Population standard deviation of the color level over the mask.
double lesion_color_level_std(const ColorLevelMap& map, const LesionMask& mask);

}  // namespace qus
