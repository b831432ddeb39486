#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qus/error.hpp"
#include "qus/random.hpp"
#include "qus/signal.hpp"
#include "support.hpp"

using namespace qus;

namespace {

RfFrame frame_from(const std::vector<std::vector<double>>& lines_data) {
    RfFrame f{Grid<double>(lines_data.size(), lines_data.front().size()), Geometry{}};
    for (std::size_t l = 0; l < lines_data.size(); ++l) {
        for (std::size_t s = 0; s < lines_data[l].size(); ++s) {
            f.samples(l, s) = lines_data[l][s];
        }
    }
    return f;
}

}  // namespace

TEST_SUITE("signal") {
    TEST_CASE("envelope matches direct-DFT analytic signal") {
        Rng rng(11);
        for (std::size_t n : {128u, 129u, 200u}) {
            std::vector<std::vector<double>> data(3, std::vector<double>(n));
            for (auto& line : data) {
                for (auto& v : line) v = rng.normal();
            }
            const auto env = demodulate_envelope(frame_from(data));
            for (std::size_t l = 0; l < data.size(); ++l) {
                const auto expected = oracle::dft_envelope(data[l]);
                for (std::size_t s = 0; s < n; ++s) {
                    CHECK(env.samples(l, s) == doctest::Approx(expected[s]).epsilon(1e-9));
                }
            }
        }
    }

    TEST_CASE("pure tone on an exact bin has a flat envelope") {
        const std::size_t n = 256;
        std::vector<double> tone(n);
        for (std::size_t t = 0; t < n; ++t) tone[t] = 2.5 * std::cos(2 * std::numbers::pi * 37.0 * t / n + 0.3);
        const auto env = demodulate_envelope(frame_from({tone}));
        for (std::size_t t = 0; t < n; ++t) CHECK(env.samples(0, t) == doctest::Approx(2.5).epsilon(1e-12));
    }

    TEST_CASE("log compression maps decibels linearly onto [0, 1]") {
        EnvelopeFrame env{Grid<double>(1, 5), Geometry{}};
        env.samples(0, 0) = 10.0;
        env.samples(0, 1) = 10.0 * std::pow(10.0, -30.0 / 20.0);
        env.samples(0, 2) = 10.0 * std::pow(10.0, -60.0 / 20.0);
        env.samples(0, 3) = 10.0 * std::pow(10.0, -90.0 / 20.0);
        env.samples(0, 4) = 0.0;
        const auto b = log_compress(env, 60.0);
        CHECK(b.pixels(0, 0) == doctest::Approx(1.0));
        CHECK(b.pixels(0, 1) == doctest::Approx(0.5));
        CHECK(b.pixels(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(b.pixels(0, 3) == 0.0);
        CHECK(b.pixels(0, 4) == 0.0);
        CHECK(b.dynamic_range_db == 60.0);
    }

    TEST_CASE("frame validation") {
        RfFrame ok{Grid<double>(2, 64, 0.0), Geometry{}};
        CHECK_NOTHROW(ok.validate());

        RfFrame shallow{Grid<double>(2, 63, 0.0), Geometry{}};
        CHECK_THROWS_AS(shallow.validate(), Error);

        RfFrame under = ok;
        under.geometry.f0_hz = 20e6;
        try {
            under.validate();
            FAIL("expected undersampled_frame");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::undersampled_frame);
        }

        RfFrame nan = ok;
        nan.samples(1, 5) = std::numeric_limits<double>::quiet_NaN();
        try {
            nan.validate();
            FAIL("expected non_finite_input");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::non_finite_input);
        }
    }

    TEST_CASE("lesion mask validation and area") {
        BinaryImage bits(10, 10, 0);
        try {
            LesionMask::from_bits(bits, 1e-4, 2e-4);
            FAIL("expected empty_mask");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::empty_mask);
        }
        bits(1, 1) = 1;
        bits(5, 5) = 1;
        try {
            LesionMask::from_bits(bits, 1e-4, 2e-4);
            FAIL("expected disconnected_mask");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::disconnected_mask);
        }
        bits(5, 5) = 0;
        bits(2, 2) = 1;  // diagonal neighbor: 8-connected
        const auto mask = LesionMask::from_bits(bits, 1e-4, 2e-4);
        CHECK(mask.pixel_count() == 2);
        CHECK(mask.area_cm2() == doctest::Approx(2 * 1e-4 * 2e-4 * 1e4));
    }

    TEST_CASE("components use 8-connectivity and the largest survives") {
        BinaryImage img(8, 8, 0);
        img(0, 0) = img(1, 1) = img(2, 2) = 1;
        img(6, 6) = img(6, 7) = 1;
        CHECK(count_components(img) == 2);
        const auto big = largest_component(img);
        CHECK(count_set(big) == 3);
        CHECK(big(6, 6) == 0);
    }
}
