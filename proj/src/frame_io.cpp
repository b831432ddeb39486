#include "qus/frame_io.hpp"

#include <array>
#include <cctype>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qus/error.hpp"

namespace qus {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::uint32_t to_little(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    }
    return v;
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_all(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io_error, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(out), ErrorCode::io_error, "short write to " + path.string());
}

template <typename T>
T header_field(const json& header, const char* key) {
    require(header.contains(key), ErrorCode::missing_header_field,
            std::string("missing header field: ") + key);
    try {
        return header.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::missing_header_field, std::string("header field has wrong type: ") + key);
    }
}

struct PgmHeader {
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 0;
    std::size_t offset = 0;
};

PgmHeader parse_pgm_header(const std::string& bytes, const fs::path& path) {
    std::size_t pos = 0;
    auto next_token = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos])) != 0) {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos])) == 0) {
            ++pos;
        }
        return bytes.substr(start, pos - start);
    };
    require(next_token() == "P5", ErrorCode::bad_schema, path.string() + " is not a binary PGM (P5)");
    PgmHeader h;
    try {
        h.width = std::stoul(next_token());
        h.height = std::stoul(next_token());
        h.maxval = static_cast<unsigned>(std::stoul(next_token()));
    } catch (const std::exception&) {
        fail(ErrorCode::bad_schema, "malformed PGM header in " + path.string());
    }
    // exactly one whitespace byte separates the header from the raster
    h.offset = pos + 1;
    require(h.width > 0 && h.height > 0 && h.maxval > 0 && h.maxval <= 65535, ErrorCode::bad_schema,
            "invalid PGM dimensions in " + path.string());
    return h;
}

std::string pgm_header(std::size_t width, std::size_t height, unsigned maxval) {
    return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" + std::to_string(maxval) + "\n";
}

}  // namespace

fs::path sidecar_path(const fs::path& payload) {
    fs::path p = payload;
    p += ".json";
    return p;
}

void write_frame(const RfFrame& frame, const fs::path& path) {
    frame.validate();
    const auto& g = frame.geometry;
    json header = {
        {"schema", kRfSchema},
        {"n_lines", frame.samples.lines()},
        {"n_depth", frame.samples.depth()},
        {"fs_hz", g.fs_hz},
        {"f0_hz", g.f0_hz},
        {"axial_spacing_m", g.axial_spacing_m},
        {"lateral_spacing_m", g.lateral_spacing_m},
    };
    std::string payload(frame.samples.size() * 4, '\0');
    for (std::size_t i = 0; i < frame.samples.size(); ++i) {
        const auto bits = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(frame.samples.data()[i])));
        std::memcpy(payload.data() + 4 * i, &bits, 4);
    }
    write_all(path, payload);
    write_all(sidecar_path(path), header.dump(2) + "\n");
}

RfFrame read_frame(const fs::path& path) {
    const auto header_path = sidecar_path(path);
    require(fs::exists(header_path), ErrorCode::missing_header_field,
            "missing header sidecar " + header_path.string());
    json header;
    try {
        header = json::parse(read_all(header_path));
    } catch (const json::parse_error& e) {
        fail(ErrorCode::bad_schema, "malformed header " + header_path.string() + ": " + e.what());
    }
    require(header_field<std::string>(header, "schema") == kRfSchema, ErrorCode::bad_schema,
            "unsupported frame schema in " + header_path.string());
    const auto n_lines = header_field<std::size_t>(header, "n_lines");
    const auto n_depth = header_field<std::size_t>(header, "n_depth");
    Geometry g;
    g.fs_hz = header_field<double>(header, "fs_hz");
    g.f0_hz = header_field<double>(header, "f0_hz");
    g.axial_spacing_m = header_field<double>(header, "axial_spacing_m");
    g.lateral_spacing_m = header_field<double>(header, "lateral_spacing_m");
    require(g.fs_hz > 2.0 * g.f0_hz, ErrorCode::undersampled_frame,
            "undersampled frame: fs_hz must exceed 2*f0_hz");

    const std::string payload = read_all(path);
    require(payload.size() == n_lines * n_depth * 4, ErrorCode::payload_length_mismatch,
            "payload length mismatch: header declares " + std::to_string(n_lines) + "x" +
                std::to_string(n_depth) + " float32 samples, file has " + std::to_string(payload.size()) +
                " bytes");

    RfFrame frame{Grid<double>(n_lines, n_depth), g};
    for (std::size_t i = 0; i < frame.samples.size(); ++i) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, payload.data() + 4 * i, 4);
        const float v = std::bit_cast<float>(to_little(bits));
        require(std::isfinite(v), ErrorCode::non_finite_input,
                "non-finite sample at index " + std::to_string(i) + " in " + path.string());
        frame.samples.data()[i] = v;
    }
    frame.validate();
    return frame;
}

void write_mask(const BinaryImage& mask, const fs::path& path) {
    std::string bytes = pgm_header(mask.lines(), mask.depth(), 255);
    const std::size_t offset = bytes.size();
    bytes.resize(offset + mask.size());
    for (std::size_t y = 0; y < mask.depth(); ++y) {
        for (std::size_t x = 0; x < mask.lines(); ++x) {
            bytes[offset + y * mask.lines() + x] = static_cast<char>(mask(x, y) != 0 ? 255 : 0);
        }
    }
    write_all(path, bytes);
}

BinaryImage read_mask(const fs::path& path) {
    const std::string bytes = read_all(path);
    const auto h = parse_pgm_header(bytes, path);
    require(h.maxval <= 255, ErrorCode::bad_schema, "mask must be an 8-bit PGM: " + path.string());
    require(bytes.size() == h.offset + h.width * h.height, ErrorCode::payload_length_mismatch,
            "payload length mismatch in mask " + path.string());
    BinaryImage mask(h.width, h.height, 0);
    for (std::size_t y = 0; y < h.height; ++y) {
        for (std::size_t x = 0; x < h.width; ++x) {
            mask(x, y) = bytes[h.offset + y * h.width + x] != 0 ? 1 : 0;
        }
    }
    return mask;
}

void write_pgm16(const Grid<std::uint16_t>& image, const fs::path& path) {
    std::string bytes = pgm_header(image.lines(), image.depth(), 65535);
    const std::size_t offset = bytes.size();
    bytes.resize(offset + 2 * image.size());
    for (std::size_t y = 0; y < image.depth(); ++y) {
        for (std::size_t x = 0; x < image.lines(); ++x) {
            const std::uint16_t v = image(x, y);
            const std::size_t at = offset + 2 * (y * image.lines() + x);
            bytes[at] = static_cast<char>(v >> 8);
            bytes[at + 1] = static_cast<char>(v & 0xFF);
        }
    }
    write_all(path, bytes);
}

Grid<std::uint16_t> read_pgm16(const fs::path& path) {
    const std::string bytes = read_all(path);
    const auto h = parse_pgm_header(bytes, path);
    require(h.maxval > 255, ErrorCode::bad_schema, "expected a 16-bit PGM: " + path.string());
    require(bytes.size() == h.offset + 2 * h.width * h.height, ErrorCode::payload_length_mismatch,
            "payload length mismatch in " + path.string());
    Grid<std::uint16_t> image(h.width, h.height, 0);
    for (std::size_t y = 0; y < h.height; ++y) {
        for (std::size_t x = 0; x < h.width; ++x) {
            const std::size_t at = h.offset + 2 * (y * h.width + x);
            image(x, y) = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[at]) << 8) |
                                                     static_cast<unsigned char>(bytes[at + 1]));
        }
    }
    return image;
}

}  // namespace qus
