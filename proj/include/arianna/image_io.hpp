#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arianna/scene.hpp"

namespace arianna {

/// Binary P6 with maxval 255.
std::string encode_ppm(const Frame& f);
/// Throws FormatError on anything other than an 8-bit P6 image.
Frame decode_ppm(const std::string& bytes);

std::vector<std::uint8_t> encode_png(const Frame& f);

/// Picks the format from the extension (.png, otherwise PPM).
void write_image(const std::filesystem::path& path, const Frame& f);

/// Floor raster as an image with north at the top.
Frame floor_image(const FloorRaster& raster);

}  // namespace arianna
