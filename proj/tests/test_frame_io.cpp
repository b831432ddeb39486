#include <doctest.h>

#include <fstream>
#include <functional>
#include <limits>

#include <json.hpp>

#include "qus/error.hpp"
#include "qus/frame_io.hpp"
#include "qus/random.hpp"
#include "support.hpp"

using namespace qus;
namespace fs = std::filesystem;

namespace {

RfFrame random_frame(std::size_t lines, std::size_t depth, std::uint64_t seed) {
    RfFrame f{Grid<double>(lines, depth), Geometry{}};
    Rng rng(seed);
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        f.samples.data()[i] = static_cast<float>(rng.normal());
    }
    return f;
}

ErrorCode read_error(const fs::path& p) {
    try {
        read_frame(p);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("read_frame did not throw");
    return ErrorCode::invalid_argument;
}

void rewrite_header(const fs::path& payload, const std::function<void(nlohmann::json&)>& edit) {
    std::ifstream in(sidecar_path(payload));
    auto j = nlohmann::json::parse(in);
    in.close();
    edit(j);
    std::ofstream(sidecar_path(payload)) << j.dump();
}

}  // namespace

TEST_SUITE("frame_io") {
    TEST_CASE("RF frame round-trips bit-exactly") {
        const auto dir = testutil::temp_dir("frame_rt");
        auto f = random_frame(5, 100, 3);
        f.geometry.lateral_spacing_m = 1.5e-4;
        write_frame(f, dir / "a.rf");
        const auto g = read_frame(dir / "a.rf");
        CHECK(g.samples == f.samples);
        CHECK(g.geometry == f.geometry);
        CHECK(fs::file_size(dir / "a.rf") == 5 * 100 * 4);
        fs::remove_all(dir);
    }

    TEST_CASE("header and payload errors are distinct") {
        const auto dir = testutil::temp_dir("frame_err");
        const auto p = dir / "a.rf";
        const auto f = random_frame(2, 64, 5);

        write_frame(f, p);
        fs::resize_file(p, 2 * 64 * 4 - 4);
        CHECK(read_error(p) == ErrorCode::payload_length_mismatch);
        try {
            read_frame(p);
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("payload length mismatch") != std::string::npos);
        }

        write_frame(f, p);
        rewrite_header(p, [](auto& j) { j.erase("fs_hz"); });
        CHECK(read_error(p) == ErrorCode::missing_header_field);

        write_frame(f, p);
        rewrite_header(p, [](auto& j) { j["schema"] = "rf-v0"; });
        CHECK(read_error(p) == ErrorCode::bad_schema);

        write_frame(f, p);
        rewrite_header(p, [](auto& j) { j["f0_hz"] = 25e6; });
        CHECK(read_error(p) == ErrorCode::undersampled_frame);

        write_frame(f, p);
        {
            std::fstream io(p, std::ios::binary | std::ios::in | std::ios::out);
            const float inf = std::numeric_limits<float>::infinity();
            io.seekp(12);
            io.write(reinterpret_cast<const char*>(&inf), 4);
        }
        CHECK(read_error(p) == ErrorCode::non_finite_input);

        fs::remove(sidecar_path(p));
        CHECK(read_error(p) == ErrorCode::missing_header_field);
        fs::remove_all(dir);
    }

    TEST_CASE("masks and 16-bit maps round-trip") {
        const auto dir = testutil::temp_dir("pgm");
        BinaryImage m(7, 11, 0);
        m(3, 4) = m(3, 5) = m(6, 10) = 1;
        write_mask(m, dir / "m.pgm");
        CHECK(read_mask(dir / "m.pgm") == m);

        Grid<std::uint16_t> levels(4, 3, 0);
        levels(0, 0) = 1;
        levels(3, 2) = 256;
        levels(1, 1) = 40000;
        write_pgm16(levels, dir / "l.pgm");
        CHECK(read_pgm16(dir / "l.pgm") == levels);
        CHECK_THROWS_AS(read_mask(dir / "l.pgm"), Error);
        fs::remove_all(dir);
    }
}
