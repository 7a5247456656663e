#include <chartex/draw.hpp>

#include <algorithm>
#include <cmath>

namespace chartex {

void draw_segment(RasterImage& img, Point2 a, Point2 b, double width, Rgb color,
                  PaintBounds* bounds) {
  const double r = width / 2.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
  const int x1 = std::min(img.width - 1,
                          static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
  const int y1 = std::min(img.height - 1,
                          static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (point_segment_distance({double(x), double(y)}, a, b) <= r) {
        img.set(x, y, color);
        if (bounds) bounds->include({double(x), double(y)}, 0.5);
      }
}

void draw_polyline(RasterImage& img, std::span<const Point2> pts, double width,
                   Rgb color, const StrokePattern& pattern, PaintBounds* bounds) {
  if (pts.size() < 2) return;
  if (pattern.is_solid()) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      draw_segment(img, pts[i], pts[i + 1], width, color, bounds);
    return;
  }

  // Walk the pattern along accumulated arc length so dashes flow across
  // vertices.
  double period = 0;
  for (double r : pattern.runs) period += r;
  if (period <= 0) {
    draw_polyline(img, pts, width, color, {}, bounds);
    return;
  }
  std::size_t run = 0;
  double run_left = pattern.runs[0];
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point2 a = pts[i], b = pts[i + 1];
    const double len = distance(a, b);
    if (len <= 0) continue;
    const Point2 dir = (1.0 / len) * (b - a);
    double t = 0;
    while (t < len) {
      const double step = std::min(run_left, len - t);
      if (run % 2 == 0)  // even runs are "on"
        draw_segment(img, a + t * dir, a + (t + step) * dir, width, color, bounds);
      t += step;
      run_left -= step;
      if (run_left <= 1e-9) {
        run = (run + 1) % pattern.runs.size();
        run_left = pattern.runs[run];
      }
    }
  }
}

void fill_circle(RasterImage& img, Point2 c, double radius, Rgb color) {
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(c.x + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(c.y + radius)));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - c.x, dy = y - c.y;
      if (dx * dx + dy * dy <= r2) img.set(x, y, color);
    }
}

namespace {

// Even-odd scanline crossings of the closed polygon with row y.
std::vector<double> row_crossings(std::span<const Point2> pts, double y) {
  std::vector<double> xs;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % n];
    if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
      const double t = (y - a.y) / (b.y - a.y);
      xs.push_back(a.x + t * (b.x - a.x));
    }
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

template <typename Img, typename SetPixel>
void scanline_fill(Img& img, std::span<const Point2> pts, SetPixel set_pixel) {
  if (pts.size() < 3) return;
  double min_y = pts[0].y, max_y = pts[0].y;
  for (const Point2& p : pts) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(max_y)));
  for (int y = y0; y <= y1; ++y) {
    const auto xs = row_crossings(pts, double(y));
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int xa = std::max(0, static_cast<int>(std::ceil(xs[k])));
      const int xb = std::min(img.width - 1, static_cast<int>(std::floor(xs[k + 1])));
      for (int x = xa; x <= xb; ++x) set_pixel(x, y);
    }
  }
}

}  // namespace

void fill_polygon(RasterImage& img, std::span<const Point2> pts, Rgb color) {
  scanline_fill(img, pts, [&](int x, int y) { img.set(x, y, color); });
}

void fill_polygon(BinaryMask& mask, std::span<const Point2> pts) {
  scanline_fill(mask, pts, [&](int x, int y) { mask.set(x, y, true); });
}

}  // namespace chartex
