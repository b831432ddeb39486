#pragma once

#include <filesystem>

#include "qus/signal.hpp"

namespace qus {

// RF payload: little-endian float32, scanline-major. Header lives next to it
// at `<path>.json`:
//   {"schema":"rf-v1","n_lines":..,"n_depth":..,"fs_hz":..,"f0_hz":..,
//    "axial_spacing_m":..,"lateral_spacing_m":..}
inline constexpr const char* kRfSchema = "rf-v1";

std::filesystem::path sidecar_path(const std::filesystem::path& payload);

/// Samples are narrowed to float32; frames whose samples are already
/// float-representable round-trip bit-exactly.
void write_frame(const RfFrame& frame, const std::filesystem::path& path);
RfFrame read_frame(const std::filesystem::path& path);

// 8-bit binary PGM (P5). Image x = scanline, y = depth sample; nonzero = set.
void write_mask(const BinaryImage& mask, const std::filesystem::path& path);
BinaryImage read_mask(const std::filesystem::path& path);

// 16-bit PGM (P5, maxval 65535, big-endian) for inspecting H-scan level maps.
void write_pgm16(const Grid<std::uint16_t>& image, const std::filesystem::path& path);
Grid<std::uint16_t> read_pgm16(const std::filesystem::path& path);

}  // namespace qus
