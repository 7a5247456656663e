#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace chartex {

using Rgb = std::array<std::uint8_t, 3>;

struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB8

  RasterImage() = default;
  RasterImage(int w, int h, Rgb fill = {255, 255, 255});

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  Rgb get(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
  }
  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Bilinear sample at real coordinates (pixel centers at integers). Samples
/// falling outside the frame return `fill`.
Rgb sample_bilinear(const RasterImage& img, double x, double y, Rgb fill);

void write_png(const RasterImage& img, const std::string& path);
RasterImage read_png(const std::string& path);

/// Masks are stored as 8-bit grayscale PNG with values {0, 255}; any
/// nonzero pixel reads back as foreground.
void write_mask_png(const BinaryMask& mask, const std::string& path);
BinaryMask read_mask_png(const std::string& path);

}  // namespace chartex
