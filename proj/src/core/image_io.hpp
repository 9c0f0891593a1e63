#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spectral.hpp"

namespace fda {

// Decodes PNG or JPEG (chosen by signature, not extension). Gray inputs give
// one channel, colour inputs three; alpha is dropped.
RasterImage load_image(const std::filesystem::path& path);

// Round-half-up after clamping to [0, 255].
std::vector<std::uint8_t> quantize(const RasterImage& image);
RasterImage dequantize(std::size_t height, std::size_t width, std::size_t channels,
                       std::span<const std::uint8_t> pixels);

// 8-bit PNG, gray or RGB by channel count. Output bytes depend only on the
// pixel values.
void save_png(const std::filesystem::path& path, const RasterImage& image);
void save_png_u8(const std::filesystem::path& path, std::size_t height, std::size_t width,
                 std::size_t channels, std::span<const std::uint8_t> pixels);

// Horizontal concatenation of same-height images.
RasterImage hconcat(std::span<const RasterImage> panels);

}  // namespace fda
