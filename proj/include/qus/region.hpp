#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qus/grid.hpp"
#include "qus/signal.hpp"

namespace qus {

struct PixelPoint {
    std::int64_t line = 0;
    std::int64_t sample = 0;

    auto operator<=>(const PixelPoint&) const = default;
};

/// Convex hull of the lesion pixel centers.
///
/// `polygon_area` is the shoelace area of the hull polygon. `hull_area` counts
/// the pixel centers inside or on that polygon (Pick's theorem:
/// polygon_area + boundary_points / 2 + 1), which puts it in the same unit as
/// `contour_area` (the lesion pixel count). Roughness is dA/A with
/// dA = hull_area - contour_area.
struct HullResult {
    std::vector<PixelPoint> hull_vertices;  // counter-clockwise, no collinear points
    double polygon_area = 0.0;
    double hull_area = 0.0;
    double contour_area = 0.0;
    double roughness = 0.0;
    bool degenerate = false;  // fewer than three non-collinear centers
};

std::vector<PixelPoint> monotone_chain_hull(std::vector<PixelPoint> points);
HullResult convex_hull(const BinaryImage& mask);
inline HullResult convex_hull(const LesionMask& mask) { return convex_hull(mask.bits()); }

/// Disk structuring element {(dl, ds) : dl^2 + ds^2 <= r^2}. Pixels outside
/// the image count as background.
BinaryImage erode(const BinaryImage& image, int radius);
BinaryImage dilate(const BinaryImage& image, int radius);

struct MarginSet {
    BinaryImage inner;     // lesion minus its erosion
    BinaryImage outer;     // dilation minus lesion
    BinaryImage combined;  // inner | outer
    int disk_radius = 0;
    bool radius_clamped = false;
};

inline constexpr double kDefaultMarginFraction = 0.10;

/// Lesion length L is the longer bounding-box side (pixels); the disk radius
/// is max(1, round(fraction * L / 2)) so the two margins together span about
/// fraction * L.
MarginSet margins(const BinaryImage& mask, double fraction = kDefaultMarginFraction);
inline MarginSet margins(const LesionMask& mask, double fraction = kDefaultMarginFraction) {
    return margins(mask.bits(), fraction);
}

struct RegionStats {
    double mean = 0.0;
    double std = 0.0;  // population
    std::size_t n_pixels = 0;
};

RegionStats region_stats(const Grid<double>& image, const BinaryImage& region);
inline RegionStats region_stats(const BModeImage& bmode, const BinaryImage& region) {
    return region_stats(bmode.pixels, region);
}

}  // namespace qus
