#include "qus/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qus/detail/fft.hpp"
#include "qus/error.hpp"

namespace qus {
namespace {

// Labels 8-connected components; returns the label grid (0 = background) and
// the size of each label (index 0 unused).
std::pair<Grid<std::uint32_t>, std::vector<std::size_t>> label_components(const BinaryImage& image) {
    Grid<std::uint32_t> labels(image.lines(), image.depth(), 0);
    std::vector<std::size_t> sizes{0};
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    const auto nl = static_cast<long>(image.lines());
    const auto nd = static_cast<long>(image.depth());
    for (long l = 0; l < nl; ++l) {
        for (long d = 0; d < nd; ++d) {
            if (image(l, d) == 0 || labels(l, d) != 0) {
                continue;
            }
            const auto label = static_cast<std::uint32_t>(sizes.size());
            std::size_t count = 0;
            labels(l, d) = label;
            stack.emplace_back(l, d);
            while (!stack.empty()) {
                auto [cl, cd] = stack.back();
                stack.pop_back();
                ++count;
                for (long dl = -1; dl <= 1; ++dl) {
                    for (long dd = -1; dd <= 1; ++dd) {
                        const long ql = static_cast<long>(cl) + dl;
                        const long qd = static_cast<long>(cd) + dd;
                        if (ql < 0 || qd < 0 || ql >= nl || qd >= nd) {
                            continue;
                        }
                        if (image(ql, qd) != 0 && labels(ql, qd) == 0) {
                            labels(ql, qd) = label;
                            stack.emplace_back(ql, qd);
                        }
                    }
                }
            }
            sizes.push_back(count);
        }
    }
    return {std::move(labels), std::move(sizes)};
}

}  // namespace

void RfFrame::validate() const {
    require(samples.lines() >= 1, ErrorCode::invalid_argument, "RF frame needs at least one scanline");
    require(samples.depth() >= kMinDepthSamples, ErrorCode::invalid_argument,
            "RF frame needs at least 64 depth samples, got " + std::to_string(samples.depth()));
    require(geometry.f0_hz > 0.0, ErrorCode::invalid_argument, "center frequency must be positive");
    require(geometry.fs_hz > 2.0 * geometry.f0_hz, ErrorCode::undersampled_frame,
            "undersampled frame: fs must exceed 2*f0");
    require(geometry.axial_spacing_m > 0.0 && geometry.lateral_spacing_m > 0.0,
            ErrorCode::invalid_argument, "pixel spacing must be positive");
    for (double v : samples.data()) {
        require(std::isfinite(v), ErrorCode::non_finite_input, "RF frame contains a non-finite sample");
    }
}

LesionMask LesionMask::from_bits(BinaryImage bits, double axial_spacing_m, double lateral_spacing_m) {
    require(axial_spacing_m > 0.0 && lateral_spacing_m > 0.0, ErrorCode::invalid_argument,
            "mask spacing must be positive");
    for (auto& b : bits.data()) {
        b = b != 0 ? 1 : 0;
    }
    const std::size_t count = count_set(bits);
    require(count > 0, ErrorCode::empty_mask, "lesion mask is empty");
    require(count_components(bits) == 1, ErrorCode::disconnected_mask,
            "lesion mask must be a single 8-connected component");
    LesionMask mask;
    mask.bits_ = std::move(bits);
    mask.count_ = count;
    mask.axial_ = axial_spacing_m;
    mask.lateral_ = lateral_spacing_m;
    return mask;
}

double LesionMask::area_cm2() const noexcept {
    return static_cast<double>(count_) * axial_ * lateral_ * 1e4;
}

EnvelopeFrame demodulate_envelope(const RfFrame& rf) {
    rf.validate();
    const std::size_t n = rf.samples.depth();
    detail::FftPlan plan(n);
    const auto weights = detail::analytic_weights(n);
    EnvelopeFrame env{Grid<double>(rf.samples.lines(), n), rf.geometry};
    std::vector<detail::cplx> buf(n);
    for (std::size_t l = 0; l < rf.samples.lines(); ++l) {
        const auto src = rf.samples.line(l);
        std::copy(src.begin(), src.end(), buf.begin());
        plan.forward(buf);
        for (std::size_t k = 0; k < n; ++k) {
            buf[k] *= weights[k];
        }
        plan.inverse(buf);
        auto dst = env.samples.line(l);
        for (std::size_t k = 0; k < n; ++k) {
            dst[k] = std::abs(buf[k]);
        }
    }
    return env;
}

BModeImage log_compress(const EnvelopeFrame& env, double dynamic_range_db) {
    require(dynamic_range_db > 0.0, ErrorCode::invalid_argument, "dynamic range must be positive");
    BModeImage out{Grid<double>(env.samples.lines(), env.samples.depth(), 0.0), dynamic_range_db};
    double peak = 0.0;
    for (double v : env.samples.data()) {
        peak = std::max(peak, v);
    }
    if (peak <= 0.0) {
        return out;
    }
    const auto& src = env.samples.data();
    auto& dst = out.pixels.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] <= 0.0) {
            continue;
        }
        const double db = 20.0 * std::log10(src[i] / peak);
        dst[i] = std::clamp(1.0 + db / dynamic_range_db, 0.0, 1.0);
    }
    return out;
}

std::size_t count_set(const BinaryImage& image) {
    return static_cast<std::size_t>(
        std::count_if(image.data().begin(), image.data().end(), [](std::uint8_t v) { return v != 0; }));
}

std::size_t count_components(const BinaryImage& image) {
    return label_components(image).second.size() - 1;
}

BinaryImage largest_component(const BinaryImage& image) {
    auto [labels, sizes] = label_components(image);
    BinaryImage out(image.lines(), image.depth(), 0);
    if (sizes.size() <= 1) {
        return out;
    }
    const auto best = static_cast<std::uint32_t>(
        std::distance(sizes.begin(), std::max_element(sizes.begin() + 1, sizes.end())));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.data()[i] = labels.data()[i] == best ? 1 : 0;
    }
    return out;
}

}  // namespace qus
