#pragma once

// Independent reference implementations used as test oracles. None of these
// share code with the library under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "qus/grid.hpp"
#include "qus/phantom.hpp"

namespace oracle {

/// O(n^2) analytic-signal magnitude by direct DFT.
inline std::vector<double> dft_envelope(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> spec(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t % n) / double(n));
        }
        spec[k] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const bool dc_or_nyquist = k == 0 || (n % 2 == 0 && k == n / 2);
        spec[k] *= dc_or_nyquist ? 1.0 : (k < (n + 1) / 2 ? 2.0 : 0.0);
    }
    std::vector<double> env(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += spec[k] * std::polar(1.0, 2.0 * std::numbers::pi * double(k * t % n) / double(n));
        }
        env[t] = std::abs(acc) / double(n);
    }
    return env;
}

/// Spectral centroid (Hz) of a real segment over positive frequencies.
inline double spectral_centroid(const std::vector<double>& x, double fs) {
    const std::size_t n = x.size();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t % n) / double(n));
        }
        const double p = std::norm(acc);
        num += p * (double(k) * fs / double(n));
        den += p;
    }
    return num / den;
}

/// Count of lattice points inside or on a convex polygon given CCW vertices.
inline double lattice_points_in_hull(const std::vector<std::pair<long, long>>& hull, long max_x, long max_y) {
    double count = 0.0;
    for (long x = 0; x <= max_x; ++x) {
        for (long y = 0; y <= max_y; ++y) {
            bool inside = true;
            for (std::size_t i = 0; i < hull.size() && inside; ++i) {
                const auto& a = hull[i];
                const auto& b = hull[(i + 1) % hull.size()];
                const long cross = (b.first - a.first) * (y - a.second) - (b.second - a.second) * (x - a.first);
                inside = cross >= 0;
            }
            count += inside ? 1.0 : 0.0;
        }
    }
    return count;
}

/// Gift-wrapping hull (Jarvis march) over pixel centers; CCW, no collinear points.
inline std::vector<std::pair<long, long>> jarvis_hull(std::vector<std::pair<long, long>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    auto cross = [](auto o, auto a, auto b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    auto dist2 = [](auto a, auto b) {
        return (a.first - b.first) * (a.first - b.first) + (a.second - b.second) * (a.second - b.second);
    };
    std::vector<std::pair<long, long>> hull;
    auto start = pts.front();
    auto p = start;
    do {
        hull.push_back(p);
        auto q = pts[0] == p ? pts[1] : pts[0];
        for (const auto& r : pts) {
            if (r == p) continue;
            const long c = cross(p, q, r);
            if (c < 0 || (c == 0 && dist2(p, r) > dist2(p, q))) {
                q = r;
            }
        }
        p = q;
    } while (p != start && hull.size() <= pts.size());
    return hull;
}

/// Brute-force binary morphology with a disk of radius r; out of image = 0.
inline qus::BinaryImage morph(const qus::BinaryImage& img, int r, bool erode) {
    qus::BinaryImage out(img.lines(), img.depth(), 0);
    const long w = long(img.lines());
    const long h = long(img.depth());
    for (long x = 0; x < w; ++x) {
        for (long y = 0; y < h; ++y) {
            bool all = true;
            bool any = false;
            for (long dx = -r; dx <= r; ++dx) {
                for (long dy = -r; dy <= r; ++dy) {
                    if (dx * dx + dy * dy > long(r) * r) continue;
                    const long xx = x + dx;
                    const long yy = y + dy;
                    const bool v = xx >= 0 && yy >= 0 && xx < w && yy < h && img(std::size_t(xx), std::size_t(yy)) != 0;
                    all = all && v;
                    any = any || v;
                }
            }
            out(std::size_t(x), std::size_t(y)) = (erode ? all : any) ? 1 : 0;
        }
    }
    return out;
}

/// Two-pass mean and population STD over selected values.
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / double(v.size()))};
}

/// Mann-Whitney pair statistic with ties counted as one half.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != -1) continue;
            pairs += 1.0;
            wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return wins / pairs;
}

/// Ranks by counting (ties averaged), then Pearson.
inline double rank_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0.0;
            double equal = 0.0;
            for (double u : v) {
                less += u < v[i] ? 1.0 : 0.0;
                equal += u == v[i] ? 1.0 : 0.0;
            }
            r[i] = less + (equal + 1.0) / 2.0;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const auto [mx, sx] = mean_std(rx);
    const auto [my, sy] = mean_std(ry);
    double c = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) c += (rx[i] - mx) * (ry[i] - my);
    return c / double(rx.size()) / (sx * sy);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace oracle

namespace testutil {

/// Small frames keep phantom-based tests fast.
inline qus::PhantomGeometry small_geometry(std::size_t lines = 64, std::size_t depth = 512) {
    qus::PhantomGeometry g;
    g.n_lines = lines;
    g.n_depth = depth;
    return g;
}

inline qus::CohortConfig small_cohort(std::size_t n_per_class = 6) {
    qus::CohortConfig c;
    c.n_benign = n_per_class;
    c.n_malignant = n_per_class;
    c.geometry = small_geometry(48, 256);
    c.min_area_cm2 = 0.02;
    c.max_area_cm2 = 0.08;
    return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("qus_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
