#pragma once

#include <chartex/geometry.hpp>
#include <chartex/image.hpp>

#include <limits>
#include <span>
#include <vector>

namespace chartex {

/// Accumulates the real-valued extent of painted geometry (brush included).
struct PaintBounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void include(Point2 p, double pad = 0) {
    min_x = std::min(min_x, p.x - pad);
    min_y = std::min(min_y, p.y - pad);
    max_x = std::max(max_x, p.x + pad);
    max_y = std::max(max_y, p.y + pad);
  }
  bool empty() const { return min_x > max_x; }
  Rect rect() const { return {min_x, min_y, max_x, max_y}; }
};

/// On/off run lengths in pixels; empty means solid.
struct StrokePattern {
  std::vector<double> runs;

  static StrokePattern solid() { return {}; }
  bool is_solid() const { return runs.empty(); }
};

/// Paints every pixel whose center lies within width/2 of the segment.
void draw_segment(RasterImage& img, Point2 a, Point2 b, double width, Rgb color,
                  PaintBounds* bounds = nullptr);

void draw_polyline(RasterImage& img, std::span<const Point2> pts, double width,
                   Rgb color, const StrokePattern& pattern = {},
                   PaintBounds* bounds = nullptr);

void fill_circle(RasterImage& img, Point2 center, double radius, Rgb color);

/// Even-odd scanline fill, pixel centers at integer coordinates.
void fill_polygon(RasterImage& img, std::span<const Point2> pts, Rgb color);
void fill_polygon(BinaryMask& mask, std::span<const Point2> pts);

}  // namespace chartex
