#include "qus/hscan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "qus/detail/fft.hpp"
#include "qus/error.hpp"

namespace qus {
namespace {

RfFrame zone_gain(const RfFrame& rf, const AttenuationSpec& spec, double direction) {
    rf.validate();
    require(spec.alpha_db_mhz_cm >= 0.0, ErrorCode::invalid_argument, "attenuation alpha must be >= 0");
    const auto zones = depth_zones(rf.samples.depth(), spec.n_zones, rf.geometry.axial_spacing_m);

    std::map<std::size_t, std::unique_ptr<detail::FftPlan>> plans;
    for (const auto& z : zones) {
        if (!plans.contains(z.length)) {
            plans.emplace(z.length, std::make_unique<detail::FftPlan>(z.length));
        }
    }

    RfFrame out = rf;
    std::vector<detail::cplx> buf;
    for (const auto& z : zones) {
        const auto& plan = *plans.at(z.length);
        std::vector<double> gain(z.length);
        for (std::size_t k = 0; k < z.length; ++k) {
            const double f_mhz = std::abs(detail::bin_frequency(k, z.length, rf.geometry.fs_hz)) * 1e-6;
            gain[k] = std::pow(10.0, direction * spec.alpha_db_mhz_cm * f_mhz * z.mean_depth_cm / 20.0);
        }
        buf.resize(z.length);
        for (std::size_t l = 0; l < rf.samples.lines(); ++l) {
            auto line = out.samples.line(l);
            for (std::size_t i = 0; i < z.length; ++i) {
                buf[i] = line[z.start + i];
            }
            plan.forward(buf);
            for (std::size_t k = 0; k < z.length; ++k) {
                buf[k] *= gain[k];
            }
            plan.inverse(buf);
            for (std::size_t i = 0; i < z.length; ++i) {
                line[z.start + i] = buf[i].real();
            }
        }
    }
    return out;
}

}  // namespace

double FilterBank::gain(std::size_t k, double f_hz) const {
    const double sigma = sigma_hz(k);
    const double d = f_hz - peak_hz[k];
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

FilterBank build_filter_bank(std::size_t n, double fmin_hz, double fmax_hz, double rel_bandwidth) {
    require(n >= 2, ErrorCode::invalid_argument, "filter bank needs at least 2 filters");
    require(n <= 65535, ErrorCode::invalid_argument, "filter bank limited to 65535 filters");
    require(fmin_hz > 0.0 && fmin_hz < fmax_hz, ErrorCode::invalid_argument, "need 0 < fmin < fmax");
    require(rel_bandwidth > 0.0, ErrorCode::invalid_argument, "relative bandwidth must be positive");
    FilterBank bank;
    bank.rel_bandwidth = rel_bandwidth;
    bank.peak_hz.resize(n);
    const double spacing = (fmax_hz - fmin_hz) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        bank.peak_hz[k] = fmin_hz + spacing * static_cast<double>(k);
    }
    bank.peak_hz.back() = fmax_hz;
    return bank;
}

std::vector<DepthZone> depth_zones(std::size_t n_depth, std::size_t n_zones, double axial_spacing_m) {
    require(n_zones >= 1, ErrorCode::invalid_argument, "need at least one depth zone");
    require(axial_spacing_m > 0.0, ErrorCode::invalid_argument, "zero axial spacing");
    const std::size_t base = n_depth / n_zones;
    require(base >= 2, ErrorCode::invalid_argument, "too many depth zones for the frame depth");
    std::vector<DepthZone> zones(n_zones);
    for (std::size_t z = 0; z < n_zones; ++z) {
        zones[z].start = z * base;
        zones[z].length = z + 1 == n_zones ? n_depth - zones[z].start : base;
        const double mean_index = static_cast<double>(zones[z].start) +
                                  0.5 * static_cast<double>(zones[z].length - 1);
        zones[z].mean_depth_cm = mean_index * axial_spacing_m * 100.0;
    }
    return zones;
}

RfFrame correct_attenuation(const RfFrame& rf, const AttenuationSpec& spec) {
    return zone_gain(rf, spec, +1.0);
}

RfFrame apply_attenuation(const RfFrame& rf, const AttenuationSpec& spec) {
    return zone_gain(rf, spec, -1.0);
}

ColorLevelMap color_level_map(const RfFrame& rf, const FilterBank& bank) {
    rf.validate();
    require(bank.size() >= 2, ErrorCode::invalid_argument, "filter bank needs at least 2 filters");
    const std::size_t n = rf.samples.depth();
    const std::size_t nf = bank.size();
    detail::FftPlan plan(n);

    // analytic band-pass transfer function per filter, one row per filter
    const auto weights = detail::analytic_weights(n);
    std::vector<double> transfer(nf * n, 0.0);
    for (std::size_t k = 0; k < nf; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (weights[j] == 0.0) {
                continue;
            }
            transfer[k * n + j] = weights[j] * bank.gain(k, detail::bin_frequency(j, n, rf.geometry.fs_hz));
        }
    }

    ColorLevelMap levels(rf.samples.lines(), n, 1);
    std::vector<detail::cplx> spectrum(n);
    std::vector<detail::cplx> filtered(n);
    std::vector<double> power(nf * n);
    std::vector<double> peak(n);
    for (std::size_t l = 0; l < rf.samples.lines(); ++l) {
        const auto src = rf.samples.line(l);
        std::copy(src.begin(), src.end(), spectrum.begin());
        plan.forward(spectrum);
        std::fill(peak.begin(), peak.end(), 0.0);
        for (std::size_t k = 0; k < nf; ++k) {
            const double* h = transfer.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) {
                filtered[j] = spectrum[j] * h[j];
            }
            plan.inverse(filtered);
            double* p = power.data() + k * n;
            for (std::size_t t = 0; t < n; ++t) {
                p[t] = std::norm(filtered[t]);
                peak[t] = std::max(peak[t], p[t]);
            }
        }
        auto out = levels.line(l);
        for (std::size_t t = 0; t < n; ++t) {
            const double floor = peak[t] * (1.0 - kColorLevelTieTolerance);
            for (std::size_t k = 0; k < nf; ++k) {
                if (power[k * n + t] >= floor) {
                    out[t] = static_cast<std::uint16_t>(k + 1);
                    break;
                }
            }
        }
    }
    return levels;
}

double lesion_color_level(const ColorLevelMap& map, const LesionMask& mask) {
    require(map.same_shape(mask.bits()), ErrorCode::shape_mismatch, "color map and mask differ in shape");
    require(mask.pixel_count() > 0, ErrorCode::empty_mask, "empty lesion mask");
    double sum = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (mask.bits().data()[i] != 0) {
            sum += map.data()[i];
        }
    }
    return sum / static_cast<double>(mask.pixel_count());
}

double lesion_color_level_std(const ColorLevelMap& map, const LesionMask& mask) {
    const double mean = lesion_color_level(map, mask);
    double ss = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (mask.bits().data()[i] != 0) {
            const double d = map.data()[i] - mean;
            ss += d * d;
        }
    }
    return std::sqrt(ss / static_cast<double>(mask.pixel_count()));
}

}  // namespace qus
