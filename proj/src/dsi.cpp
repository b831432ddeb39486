#include "qus/dsi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>

#include <png.h>

#include "qus/error.hpp"
#include "qus/model.hpp"

namespace qus {

std::vector<LutAnchor> default_lut_anchors() {
    return {
        {0, {135, 206, 250}},
        {64, {0, 200, 0}},
        {160, {255, 255, 0}},
        {255, {255, 0, 0}},
    };
}

Lut build_lut(std::span<const LutAnchor> anchors) {
    require(anchors.size() >= 2 && anchors.front().index == 0 && anchors.back().index == 255,
            ErrorCode::config_error, "LUT anchors must start at 0 and end at 255");
    for (std::size_t a = 1; a < anchors.size(); ++a) {
        require(anchors[a].index > anchors[a - 1].index, ErrorCode::config_error,
                "LUT anchor indices must increase strictly");
    }
    Lut lut{};
    for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
        const auto& p = anchors[a];
        const auto& q = anchors[a + 1];
        const double span = static_cast<double>(q.index - p.index);
        for (std::size_t i = p.index; i <= q.index; ++i) {
            const double t = static_cast<double>(i - p.index) / span;
            auto mix = [t](std::uint8_t u, std::uint8_t v) {
                return static_cast<std::uint8_t>(std::lround(u + t * (static_cast<double>(v) - u)));
            };
            lut[i] = {mix(p.color.r, q.color.r), mix(p.color.g, q.color.g), mix(p.color.b, q.color.b)};
        }
    }
    return lut;
}

double hue_degrees(const Rgb& c) {
    const double r = c.r, g = c.g, b = c.b;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    if (d == 0.0) {
        return 0.0;
    }
    double h = 0.0;
    if (mx == r) {
        h = 60.0 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / d + 2.0);
    } else {
        h = 60.0 * ((r - g) / d + 4.0);
    }
    return h < 0.0 ? h + 360.0 : h;
}

ColorScale make_scale(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorCode::invalid_argument,
            "color scale needs finite lo < hi");
    ColorScale s;
    s.lo = lo;
    s.hi = hi;
    return s;
}

ColorScale calibrate_scale(std::span<const double> training_scores) {
    require(training_scores.size() >= 10, ErrorCode::invalid_argument, "scale calibration needs >= 10 scores");
    std::vector<double> v(training_scores.begin(), training_scores.end());
    for (double x : v) {
        require(std::isfinite(x), ErrorCode::non_finite_input, "non-finite training score");
    }
    std::sort(v.begin(), v.end());
    auto percentile = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
    };
    double lo = percentile(0.025);
    double hi = percentile(0.975);
    if (!(lo < hi)) {
        lo -= 1e-6;
        hi += 1e-6;
    }
    ColorScale s;
    s.lo = lo;
    s.hi = hi;
    return s;
}

std::size_t score_to_index(double value, const ColorScale& scale) {
    const double t = std::clamp((value - scale.lo) / (scale.hi - scale.lo), 0.0, 1.0);
    return static_cast<std::size_t>(std::floor(t * 255.0 + 0.5));
}

Rgb score_to_color(double value, const ColorScale& scale) { return scale.lut[score_to_index(value, scale)]; }

ScoreMap local_score_map(const ColorLevelMap& levels, const FeatureVector& global, const TrainedModel& model,
                         const LesionMask& mask, Scorer scorer) {
    require(levels.same_shape(mask.bits()), ErrorCode::shape_mismatch, "color map and mask are not aligned");
    const auto slot = std::find(model.features.begin(), model.features.end(), Feature::hscan_color_level);
    require(slot != model.features.end(), ErrorCode::scorer_mismatch,
            "model has no hscan_color_level feature, so " + std::string(to_string(scorer)) +
                " scores cannot be localized");
    const auto col = static_cast<Eigen::Index>(slot - model.features.begin());

    Vector raw = feature_columns(global, model.features);
    std::map<std::uint16_t, double> cache;
    ScoreMap out{Grid<double>(levels.lines(), levels.depth(), std::numeric_limits<double>::quiet_NaN()), mask.bits(),
                 scorer};
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (mask.bits().data()[i] == 0) {
            continue;
        }
        const auto level = levels.data()[i];
        auto it = cache.find(level);
        if (it == cache.end()) {
            raw(col) = static_cast<double>(level);
            it = cache.emplace(level, score_with(model, scorer, raw)).first;
        }
        out.values.data()[i] = it->second;
    }
    return out;
}

ScoreMap smooth(const ScoreMap& map, int median_k, double gaussian_sigma) {
    require(median_k >= 1 && median_k % 2 == 1, ErrorCode::invalid_argument, "median_k must be odd and >= 1");
    require(gaussian_sigma >= 0.0, ErrorCode::invalid_argument, "gaussian_sigma must be >= 0");
    require(map.values.same_shape(map.mask), ErrorCode::shape_mismatch, "score map and mask are not aligned");
    const auto w = static_cast<long>(map.values.lines());
    const auto h = static_cast<long>(map.values.depth());
    auto inside = [&](long x, long y) {
        return x >= 0 && y >= 0 && x < w && y < h && map.mask(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) != 0;
    };

    ScoreMap med = map;
    const long r = median_k / 2;
    std::vector<double> window;
    for (long x = 0; x < w; ++x) {
        for (long y = 0; y < h; ++y) {
            if (!inside(x, y)) {
                continue;
            }
            window.clear();
            for (long dx = -r; dx <= r; ++dx) {
                for (long dy = -r; dy <= r; ++dy) {
                    if (inside(x + dx, y + dy)) {
                        window.push_back(map.values(static_cast<std::size_t>(x + dx), static_cast<std::size_t>(y + dy)));
                    }
                }
            }
            const auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
            std::nth_element(window.begin(), mid, window.end());
            med.values(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = *mid;
        }
    }
    if (gaussian_sigma == 0.0) {
        return med;
    }

    const long gr = static_cast<long>(std::ceil(3.0 * gaussian_sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * gr + 1));
    for (long d = -gr; d <= gr; ++d) {
        kernel[static_cast<std::size_t>(d + gr)] = std::exp(-0.5 * d * d / (gaussian_sigma * gaussian_sigma));
    }
    ScoreMap out = med;
    for (long x = 0; x < w; ++x) {
        for (long y = 0; y < h; ++y) {
            if (!inside(x, y)) {
                continue;
            }
            double sum = 0.0;
            double weight = 0.0;
            for (long dx = -gr; dx <= gr; ++dx) {
                for (long dy = -gr; dy <= gr; ++dy) {
                    if (inside(x + dx, y + dy)) {
                        const double k = kernel[static_cast<std::size_t>(dx + gr)] * kernel[static_cast<std::size_t>(dy + gr)];
                        sum += k * med.values(static_cast<std::size_t>(x + dx), static_cast<std::size_t>(y + dy));
                        weight += k;
                    }
                }
            }
            out.values(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = sum / weight;
        }
    }
    return out;
}

Rgb RgbImage::at(std::size_t x, std::size_t y) const {
    const std::size_t i = 3 * (y * width + x);
    return {data[i], data[i + 1], data[i + 2]};
}

RgbImage render_overlay(const BModeImage& bmode, const ScoreMap& map, const LesionMask& mask, const ColorScale& scale,
                        double opacity) {
    require(bmode.pixels.same_shape(map.values) && bmode.pixels.same_shape(mask.bits()), ErrorCode::shape_mismatch,
            "overlay inputs are not aligned");
    require(opacity >= 0.0 && opacity <= 1.0, ErrorCode::invalid_argument, "opacity must lie in [0, 1]");
    RgbImage img;
    img.width = bmode.pixels.lines();
    img.height = bmode.pixels.depth();
    img.data.resize(3 * img.width * img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const double gray = std::round(std::clamp(bmode.pixels(x, y), 0.0, 1.0) * 255.0);
            Rgb px{static_cast<std::uint8_t>(gray), static_cast<std::uint8_t>(gray), static_cast<std::uint8_t>(gray)};
            if (mask.bits()(x, y) != 0) {
                const double v = map.values(x, y);
                require(std::isfinite(v), ErrorCode::non_finite_input, "score map undefined inside the mask");
                const Rgb c = score_to_color(v, scale);
                auto blend = [&](std::uint8_t col) {
                    return static_cast<std::uint8_t>(std::lround((1.0 - opacity) * gray + opacity * col));
                };
                px = {blend(c.r), blend(c.g), blend(c.b)};
            }
            const std::size_t i = 3 * (y * img.width + x);
            img.data[i] = px.r;
            img.data[i + 1] = px.g;
            img.data[i + 2] = px.b;
        }
    }
    return img;
}

double mean_hue_index(const ScoreMap& map, const ColorScale& scale) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.mask.data()[i] != 0) {
            sum += static_cast<double>(score_to_index(map.values.data()[i], scale));
            ++n;
        }
    }
    require(n > 0, ErrorCode::empty_mask, "score map has an empty mask");
    return sum / static_cast<double>(n);
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
    require(image.data.size() == 3 * image.width * image.height && image.width > 0 && image.height > 0,
            ErrorCode::invalid_argument, "malformed RGB image");
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    require(fp != nullptr, ErrorCode::io_error, "cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        fail(ErrorCode::io_error, "libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png)) != 0) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorCode::io_error, "PNG encoding failed for " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < image.height; ++y) {
        png_write_row(png, image.data.data() + 3 * y * image.width);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace qus
