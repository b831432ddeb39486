#include <doctest.h>

#include <cmath>
#include <fstream>

#include "qus/dsi.hpp"
#include "qus/error.hpp"
#include "qus/model.hpp"
#include "qus/random.hpp"
#include "support.hpp"

using namespace qus;

namespace {

// Malignant rows have lower color levels and higher Burr b.
TrainedModel toy_model(std::vector<Feature> features, std::uint64_t seed = 1) {
    Rng rng(seed);
    std::vector<FeatureVector> rows(40);
    Labels y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        y[i] = i % 2 ? 1 : -1;
        rows[i][Feature::hscan_color_level] = 130.0 - 20.0 * y[i] + 8.0 * rng.normal();
        rows[i][Feature::burr_b] = 3.0 + 0.6 * y[i] + 0.3 * rng.normal();
        rows[i][Feature::boundary_roughness] = 0.1 + 0.05 * y[i] + 0.03 * rng.normal();
    }
    const Matrix raw = feature_table(rows, features);
    TrainOptions opt;
    opt.tune = false;
    opt.svm = SvmParams{1.0, 0.5};
    return train_model(raw, y, std::move(features), opt);
}

LesionMask block_mask(std::size_t w, std::size_t h, std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1) {
    BinaryImage bits(w, h, 0);
    for (std::size_t x = x0; x < x1; ++x)
        for (std::size_t y = y0; y < y1; ++y) bits(x, y) = 1;
    return LesionMask::from_bits(bits, 1e-4, 1e-4);
}

}  // namespace

TEST_SUITE("dsi") {
    TEST_CASE("default LUT hits its anchors and hue falls monotonically") {
        const auto lut = build_lut(default_lut_anchors());
        CHECK(lut[0] == Rgb{135, 206, 250});
        CHECK(lut[64] == Rgb{0, 200, 0});
        CHECK(lut[160] == Rgb{255, 255, 0});
        CHECK(lut[255] == Rgb{255, 0, 0});
        for (std::size_t i = 65; i < 256; ++i) CHECK(hue_degrees(lut[i]) <= hue_degrees(lut[i - 1]));
        CHECK(hue_degrees(lut[0]) > hue_degrees(lut[64]));
        CHECK(hue_degrees(lut[255]) == 0.0);
        const std::vector<LutAnchor> bad{{0, {}}, {200, {}}};
        CHECK_THROWS_AS(build_lut(bad), Error);
    }

    TEST_CASE("scale endpoints and midpoint map to LUT 0, 128 and 255") {
        const auto s = make_scale(-2.0, 2.0);
        CHECK(score_to_index(-2.0, s) == 0);
        CHECK(score_to_index(0.0, s) == 128);
        CHECK(score_to_index(2.0, s) == 255);
        CHECK(score_to_index(-50.0, s) == 0);
        CHECK(score_to_index(50.0, s) == 255);
        CHECK(score_to_color(2.0, s) == Rgb{255, 0, 0});
    }

    TEST_CASE("percentile calibration") {
        std::vector<double> u(10001);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = -1.0 + 2.0 * double(i) / 10000.0;
        const auto s = calibrate_scale(u);
        CHECK(s.lo == doctest::Approx(-0.95).epsilon(1e-9));
        CHECK(s.hi == doctest::Approx(0.95).epsilon(1e-9));
        std::vector<double> rev(u.rbegin(), u.rend());
        Rng rng(2);
        shuffle(rev, rng);
        const auto t = calibrate_scale(rev);
        CHECK(t.lo == s.lo);
        CHECK(t.hi == s.hi);
        const std::vector<double> flat(20, 3.0);
        const auto f = calibrate_scale(flat);
        CHECK(f.lo == doctest::Approx(3.0 - 1e-6));
        CHECK(f.hi == doctest::Approx(3.0 + 1e-6));
        CHECK_THROWS_AS(calibrate_scale(std::vector<double>(5, 1.0)), Error);
    }

    TEST_CASE("local maps follow the color level") {
        const auto model = toy_model({Feature::hscan_color_level, Feature::burr_b});
        FeatureVector global;
        global[Feature::burr_b] = 3.2;
        global[Feature::hscan_color_level] = 120.0;
        const auto mask = block_mask(30, 30, 5, 25, 5, 25);

        ColorLevelMap uniform(30, 30, 140);
        const auto flat = local_score_map(uniform, global, model, mask, Scorer::projection);
        double first = std::nan("");
        for (std::size_t i = 0; i < flat.values.size(); ++i) {
            if (mask.bits().data()[i]) {
                if (std::isnan(first)) first = flat.values.data()[i];
                CHECK(flat.values.data()[i] == first);
            } else {
                CHECK(std::isnan(flat.values.data()[i]));
            }
        }

        ColorLevelMap split(30, 30, 100);
        for (std::size_t x = 15; x < 30; ++x)
            for (std::size_t y = 0; y < 30; ++y) split(x, y) = 160;
        for (Scorer s : {Scorer::pc1, Scorer::projection, Scorer::svm_distance}) {
            const auto m = local_score_map(split, global, model, mask, s);
            CHECK(m.values(6, 10) != m.values(20, 10));
            CHECK(m.values(6, 10) > m.values(20, 10));  // lower level scores more malignant
        }

        // per-pixel oracle: global features with the pixel's own level
        Rng rng(8);
        ColorLevelMap noisy(30, 30, 0);
        for (auto& v : noisy.data()) v = static_cast<std::uint16_t>(rng.uniform_int(1, 256));
        const auto m = local_score_map(noisy, global, model, mask, Scorer::svm_distance);
        for (int k = 0; k < 20; ++k) {
            const auto x = std::size_t(rng.uniform_int(5, 24));
            const auto y = std::size_t(rng.uniform_int(5, 24));
            FeatureVector fv = global;
            fv[Feature::hscan_color_level] = noisy(x, y);
            const double expected = score(model, feature_columns(fv, model.features)).svm_distance;
            CHECK(m.values(x, y) == expected);
        }
    }

    TEST_CASE("models without the color level cannot be localized") {
        const auto model = toy_model({Feature::burr_b, Feature::boundary_roughness});
        const auto mask = block_mask(10, 10, 2, 8, 2, 8);
        try {
            local_score_map(ColorLevelMap(10, 10, 5), FeatureVector{}, model, mask, Scorer::pc1);
            FAIL("expected scorer_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::scorer_mismatch);
        }
    }

    TEST_CASE("smoothing keeps constants, removes impulses and stays within range") {
        const auto mask = block_mask(20, 20, 3, 17, 3, 17);
        ScoreMap m{Grid<double>(20, 20, std::nan("")), mask.bits(), Scorer::pc1};
        for (std::size_t i = 0; i < m.values.size(); ++i)
            if (mask.bits().data()[i]) m.values.data()[i] = 0.25;
        const auto c = smooth(m);
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            if (mask.bits().data()[i]) CHECK(c.values.data()[i] == doctest::Approx(0.25).epsilon(1e-12));
        }
        ScoreMap spike = m;
        spike.values(10, 10) = 100.0;
        const auto s = smooth(spike);
        CHECK(s.values(10, 10) == doctest::Approx(0.25).epsilon(1e-12));

        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng rng(seed);
            ScoreMap r = m;
            double lo = 1e9, hi = -1e9;
            for (std::size_t i = 0; i < r.values.size(); ++i) {
                if (!mask.bits().data()[i]) continue;
                r.values.data()[i] = rng.normal();
                lo = std::min(lo, r.values.data()[i]);
                hi = std::max(hi, r.values.data()[i]);
            }
            const auto out = smooth(r);
            for (std::size_t i = 0; i < out.values.size(); ++i) {
                if (!mask.bits().data()[i]) {
                    CHECK(std::isnan(out.values.data()[i]));
                    continue;
                }
                CHECK(out.values.data()[i] >= lo - 1e-12);
                CHECK(out.values.data()[i] <= hi + 1e-12);
            }
        }
    }

    TEST_CASE("overlay blending and PNG output") {
        const auto mask = block_mask(12, 10, 2, 8, 2, 8);
        BModeImage bm{Grid<double>(12, 10, 0.4), 60.0};
        ScoreMap m{Grid<double>(12, 10, std::nan("")), mask.bits(), Scorer::pc1};
        for (std::size_t i = 0; i < m.values.size(); ++i)
            if (mask.bits().data()[i]) m.values.data()[i] = 1.0;
        const auto scale = make_scale(0.0, 1.0);
        const auto gray = render_overlay(bm, m, mask, scale, 0.0);
        const auto full = render_overlay(bm, m, mask, scale, 1.0);
        const std::uint8_t g = static_cast<std::uint8_t>(std::round(0.4 * 255));
        CHECK(gray.at(0, 0) == Rgb{g, g, g});
        CHECK(gray.at(4, 4) == Rgb{g, g, g});
        CHECK(full.at(4, 4) == Rgb{255, 0, 0});
        CHECK(full.at(0, 0) == Rgb{g, g, g});
        const auto mid = render_overlay(bm, m, mask, scale, 0.6);
        CHECK(mid.at(4, 4).r == std::lround(0.4 * g + 0.6 * 255));
        CHECK(render_overlay(bm, m, mask, scale, 0.6) == mid);
        CHECK(mean_hue_index(m, scale) == 255.0);

        const auto dir = testutil::temp_dir("dsi_png");
        write_png(mid, dir / "a.png");
        std::ifstream in(dir / "a.png", std::ios::binary);
        char sig[8];
        in.read(sig, 8);
        CHECK(std::string(sig, 8) == std::string("\x89PNG\r\n\x1a\n", 8));
        std::filesystem::remove_all(dir);

        BModeImage wrong{Grid<double>(11, 10, 0.4), 60.0};
        try {
            render_overlay(wrong, m, mask, scale);
            FAIL("expected shape_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::shape_mismatch);
        }
    }
}
