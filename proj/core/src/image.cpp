#include <chartex/image.hpp>

#include <cmath>

namespace chartex {

RasterImage::RasterImage(int w, int h, Rgb fill)
    : width(w), height(h), pixels(std::size_t(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

Rgb sample_bilinear(const RasterImage& img, double x, double y, Rgb fill) {
  if (x < 0 || y < 0 || x > img.width - 1 || y > img.height - 1) return fill;
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const Rgb p00 = img.get(x0, y0), p10 = img.get(x1, y0);
  const Rgb p01 = img.get(x0, y1), p11 = img.get(x1, y1);
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] * (1 - fx) + p10[c] * fx;
    const double bot = p01[c] * (1 - fx) + p11[c] * fx;
    const double v = top * (1 - fy) + bot * fy;
    out[c] = static_cast<std::uint8_t>(std::lround(std::min(255.0, std::max(0.0, v))));
  }
  return out;
}

}  // namespace chartex
