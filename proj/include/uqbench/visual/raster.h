#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace uqbench::visual {

// 8-bit RGB, row-major, interleaved.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  std::uint8_t& at(int x, int y, int c) { return pixels[offset(x, y) + c]; }
  std::uint8_t at(int x, int y, int c) const { return pixels[offset(x, y) + c]; }

  bool operator==(const RasterImage&) const = default;
};

// PNG or JPEG, detected from the leading magic bytes. Alpha is dropped and
// grayscale promoted to RGB. Throws DataError on undecodable input.
RasterImage decode_image(std::span<const std::uint8_t> bytes);
RasterImage read_image(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const RasterImage& image);
std::vector<std::uint8_t> encode_jpeg(const RasterImage& image,
                                      int quality = 90);
void write_png(const std::filesystem::path& path, const RasterImage& image);

// Single-channel 8-bit PNG (used by relevance-mask sidecars).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;
};
GrayImage decode_gray_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_gray_png(const GrayImage& image);

// Box-filtered downscale so the longer side is at most `max_side`.
RasterImage thumbnail(const RasterImage& image, int max_side);

}  // namespace uqbench::visual
