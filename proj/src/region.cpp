#include "qus/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qus/error.hpp"

namespace qus {
namespace {

std::int64_t cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
    return (a.line - o.line) * (b.sample - o.sample) - (a.sample - o.sample) * (b.line - o.line);
}

// Row-wise prefix counts: prefix(l, s) = set pixels in line l before sample s.
Grid<std::uint32_t> line_prefix(const BinaryImage& image) {
    Grid<std::uint32_t> prefix(image.lines(), image.depth() + 1, 0);
    for (std::size_t l = 0; l < image.lines(); ++l) {
        for (std::size_t s = 0; s < image.depth(); ++s) {
            prefix(l, s + 1) = prefix(l, s) + (image(l, s) != 0 ? 1 : 0);
        }
    }
    return prefix;
}

std::vector<long> disk_half_widths(int radius) {
    std::vector<long> w(2 * static_cast<std::size_t>(radius) + 1);
    for (int dl = -radius; dl <= radius; ++dl) {
        w[static_cast<std::size_t>(dl + radius)] =
            static_cast<long>(std::floor(std::sqrt(static_cast<double>(radius * radius - dl * dl)) + 1e-12));
    }
    return w;
}

}  // namespace

std::vector<PixelPoint> monotone_chain_hull(std::vector<PixelPoint> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) {
        return points;
    }
    std::vector<PixelPoint> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) {
            --k;
        }
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) {
            --k;
        }
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

HullResult convex_hull(const BinaryImage& mask) {
    // the extreme pixels of each scanline carry the whole hull
    std::vector<PixelPoint> candidates;
    std::size_t count = 0;
    for (std::size_t l = 0; l < mask.lines(); ++l) {
        long first = -1;
        long last = -1;
        for (std::size_t s = 0; s < mask.depth(); ++s) {
            if (mask(l, s) != 0) {
                ++count;
                if (first < 0) {
                    first = static_cast<long>(s);
                }
                last = static_cast<long>(s);
            }
        }
        if (first >= 0) {
            candidates.push_back({static_cast<std::int64_t>(l), first});
            candidates.push_back({static_cast<std::int64_t>(l), last});
        }
    }
    require(count > 0, ErrorCode::empty_mask, "convex hull of an empty mask");

    HullResult r;
    r.hull_vertices = monotone_chain_hull(std::move(candidates));
    r.contour_area = static_cast<double>(count);
    const auto& h = r.hull_vertices;

    std::int64_t twice_area = 0;
    std::int64_t boundary = 0;
    if (h.size() >= 3) {
        for (std::size_t i = 0; i < h.size(); ++i) {
            const auto& a = h[i];
            const auto& b = h[(i + 1) % h.size()];
            twice_area += a.line * b.sample - b.line * a.sample;
            boundary += std::gcd(std::abs(b.line - a.line), std::abs(b.sample - a.sample));
        }
        r.polygon_area = static_cast<double>(twice_area) / 2.0;
        r.hull_area = r.polygon_area + static_cast<double>(boundary) / 2.0 + 1.0;
    } else {
        r.degenerate = true;
        r.polygon_area = 0.0;
        if (h.size() == 2) {
            r.hull_area = static_cast<double>(
                std::gcd(std::abs(h[1].line - h[0].line), std::abs(h[1].sample - h[0].sample)) + 1);
        } else {
            r.hull_area = 1.0;
        }
    }
    r.roughness = (r.hull_area - r.contour_area) / r.contour_area;
    return r;
}

BinaryImage erode(const BinaryImage& image, int radius) {
    require(radius >= 0, ErrorCode::invalid_argument, "negative structuring radius");
    if (radius == 0) {
        return image;
    }
    const auto prefix = line_prefix(image);
    const auto widths = disk_half_widths(radius);
    const long nl = static_cast<long>(image.lines());
    const long nd = static_cast<long>(image.depth());
    BinaryImage out(image.lines(), image.depth(), 0);
    for (long l = 0; l < nl; ++l) {
        for (long s = 0; s < nd; ++s) {
            if (image(l, s) == 0) {
                continue;
            }
            bool keep = true;
            for (long dl = -radius; dl <= radius && keep; ++dl) {
                const long ql = l + dl;
                const long w = widths[static_cast<std::size_t>(dl + radius)];
                if (ql < 0 || ql >= nl || s - w < 0 || s + w >= nd) {
                    keep = false;
                    break;
                }
                const auto run = prefix(ql, s + w + 1) - prefix(ql, s - w);
                keep = run == static_cast<std::uint32_t>(2 * w + 1);
            }
            out(l, s) = keep ? 1 : 0;
        }
    }
    return out;
}

BinaryImage dilate(const BinaryImage& image, int radius) {
    require(radius >= 0, ErrorCode::invalid_argument, "negative structuring radius");
    if (radius == 0) {
        return image;
    }
    const auto prefix = line_prefix(image);
    const auto widths = disk_half_widths(radius);
    const long nl = static_cast<long>(image.lines());
    const long nd = static_cast<long>(image.depth());
    BinaryImage out(image.lines(), image.depth(), 0);
    for (long l = 0; l < nl; ++l) {
        for (long s = 0; s < nd; ++s) {
            bool hit = false;
            for (long dl = -radius; dl <= radius && !hit; ++dl) {
                const long ql = l + dl;
                if (ql < 0 || ql >= nl) {
                    continue;
                }
                const long w = widths[static_cast<std::size_t>(dl + radius)];
                const long lo = std::max(0L, s - w);
                const long hi = std::min(nd - 1, s + w);
                hit = prefix(ql, hi + 1) > prefix(ql, lo);
            }
            out(l, s) = hit ? 1 : 0;
        }
    }
    return out;
}

MarginSet margins(const BinaryImage& mask, double fraction) {
    require(fraction > 0.0 && fraction < 0.5, ErrorCode::invalid_argument, "margin fraction must be in (0, 0.5)");
    std::size_t lmin = mask.lines(), lmax = 0, smin = mask.depth(), smax = 0;
    bool any = false;
    for (std::size_t l = 0; l < mask.lines(); ++l) {
        for (std::size_t s = 0; s < mask.depth(); ++s) {
            if (mask(l, s) != 0) {
                any = true;
                lmin = std::min(lmin, l);
                lmax = std::max(lmax, l);
                smin = std::min(smin, s);
                smax = std::max(smax, s);
            }
        }
    }
    require(any, ErrorCode::empty_mask, "margins of an empty mask");
    const double length = static_cast<double>(std::max(lmax - lmin + 1, smax - smin + 1));

    MarginSet m;
    m.disk_radius = std::max(1, static_cast<int>(std::lround(fraction * length / 2.0)));
    BinaryImage core = erode(mask, m.disk_radius);
    while (count_set(core) == 0 && m.disk_radius > 1) {
        m.radius_clamped = true;
        --m.disk_radius;
        core = erode(mask, m.disk_radius);
    }
    if (count_set(core) == 0) {
        // even a unit disk removes everything: the whole lesion is margin
        m.radius_clamped = true;
    }
    const BinaryImage grown = dilate(mask, m.disk_radius);

    m.inner = BinaryImage(mask.lines(), mask.depth(), 0);
    m.outer = BinaryImage(mask.lines(), mask.depth(), 0);
    m.combined = BinaryImage(mask.lines(), mask.depth(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const bool in_lesion = mask.data()[i] != 0;
        m.inner.data()[i] = in_lesion && core.data()[i] == 0 ? 1 : 0;
        m.outer.data()[i] = !in_lesion && grown.data()[i] != 0 ? 1 : 0;
        m.combined.data()[i] = m.inner.data()[i] | m.outer.data()[i];
    }
    return m;
}

RegionStats region_stats(const Grid<double>& image, const BinaryImage& region) {
    require(image.same_shape(region), ErrorCode::shape_mismatch, "region and image differ in shape");
    RegionStats st;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        if (region.data()[i] == 0) {
            continue;
        }
        ++st.n_pixels;
        const double x = image.data()[i];
        const double delta = x - mean;
        mean += delta / static_cast<double>(st.n_pixels);
        m2 += delta * (x - mean);
    }
    require(st.n_pixels > 0, ErrorCode::empty_mask, "statistics over an empty region");
    st.mean = mean;
    st.std = std::sqrt(std::max(0.0, m2 / static_cast<double>(st.n_pixels)));
    return st;
}

}  // namespace qus
