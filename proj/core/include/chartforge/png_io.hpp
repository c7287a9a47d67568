#pragma once

#include "chartforge/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace chartforge {

/// RGBA PNG encoding. Output bytes depend only on the pixels (no timestamps),
/// so identical rasters always produce identical files.
std::vector<std::uint8_t> encode_png(const RasterImage& image);
RasterImage decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const RasterImage& image);
RasterImage read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace chartforge
