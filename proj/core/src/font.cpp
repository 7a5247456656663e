#include <chartex/font.hpp>

#include <algorithm>
#include <array>
#include <vector>

namespace chartex {

namespace {

// x in [0,4], y in [0,6] (y down); {x0, y0, x1, y1} per stroke.
using Seg = std::array<double, 4>;

const std::vector<Seg>* glyph_segments(char c) {
  static const std::vector<Seg> g0 = {
      {0, 0, 4, 0}, {4, 0, 4, 6}, {4, 6, 0, 6}, {0, 6, 0, 0}};
  static const std::vector<Seg> g1 = {{2, 0, 2, 6}, {1, 1, 2, 0}, {1, 6, 3, 6}};
  static const std::vector<Seg> g2 = {
      {0, 0, 4, 0}, {4, 0, 4, 3}, {4, 3, 0, 3}, {0, 3, 0, 6}, {0, 6, 4, 6}};
  static const std::vector<Seg> g3 = {
      {0, 0, 4, 0}, {4, 0, 4, 6}, {4, 6, 0, 6}, {1, 3, 4, 3}};
  static const std::vector<Seg> g4 = {{0, 0, 0, 3}, {0, 3, 4, 3}, {4, 0, 4, 6}};
  static const std::vector<Seg> g5 = {
      {4, 0, 0, 0}, {0, 0, 0, 3}, {0, 3, 4, 3}, {4, 3, 4, 6}, {4, 6, 0, 6}};
  static const std::vector<Seg> g6 = {
      {4, 0, 0, 0}, {0, 0, 0, 6}, {0, 6, 4, 6}, {4, 6, 4, 3}, {4, 3, 0, 3}};
  static const std::vector<Seg> g7 = {{0, 0, 4, 0}, {4, 0, 1.5, 6}};
  static const std::vector<Seg> g8 = {
      {0, 0, 4, 0}, {4, 0, 4, 6}, {4, 6, 0, 6}, {0, 6, 0, 0}, {0, 3, 4, 3}};
  static const std::vector<Seg> g9 = {
      {4, 3, 0, 3}, {0, 3, 0, 0}, {0, 0, 4, 0}, {4, 0, 4, 6}, {4, 6, 0, 6}};
  static const std::vector<Seg> gdot = {{2, 5.5, 2, 6}};
  static const std::vector<Seg> gminus = {{0.5, 3, 3.5, 3}};
  static const std::vector<Seg> gpercent = {
      {0, 0, 1.4, 0},     {1.4, 0, 1.4, 1.4}, {1.4, 1.4, 0, 1.4},
      {0, 1.4, 0, 0},     {4, 0, 0, 6},       {2.6, 4.6, 4, 4.6},
      {4, 4.6, 4, 6},     {4, 6, 2.6, 6},     {2.6, 6, 2.6, 4.6}};
  static const std::vector<Seg> gk = {
      {0.5, 0, 0.5, 6}, {3.5, 1.5, 0.5, 4}, {1.6, 3.1, 3.5, 6}};
  static const std::vector<Seg> gcomma = {{2.2, 5.2, 1.7, 6.4}};

  switch (c) {
    case '0': return &g0;
    case '1': return &g1;
    case '2': return &g2;
    case '3': return &g3;
    case '4': return &g4;
    case '5': return &g5;
    case '6': return &g6;
    case '7': return &g7;
    case '8': return &g8;
    case '9': return &g9;
    case '.': return &gdot;
    case '-': return &gminus;
    case '%': return &gpercent;
    case 'k': case 'K': return &gk;
    case ',': return &gcomma;
    default: return nullptr;
  }
}

constexpr double kCellWidth = 4.0;
constexpr double kCellHeight = 6.0;
constexpr double kAdvance = 5.6;

}  // namespace

bool font_has_glyph(char c) { return glyph_segments(c) != nullptr; }

double text_width(std::string_view text, double size_px) {
  if (text.empty()) return 0;
  const double scale = size_px / kCellHeight;
  return (kAdvance * (double(text.size()) - 1) + kCellWidth) * scale;
}

PaintBounds draw_text(RasterImage& img, std::string_view text, Point2 top_left,
                      double size_px, Rgb color) {
  const double scale = size_px / kCellHeight;
  const double stroke = std::max(1.3, 0.16 * size_px);
  PaintBounds bounds;
  double pen_x = top_left.x;
  for (char c : text) {
    if (const auto* segs = glyph_segments(c)) {
      for (const Seg& s : *segs) {
        const Point2 a{pen_x + s[0] * scale, top_left.y + s[1] * scale};
        const Point2 b{pen_x + s[2] * scale, top_left.y + s[3] * scale};
        draw_segment(img, a, b, stroke, color, &bounds);
      }
    }
    pen_x += kAdvance * scale;
  }
  return bounds;
}

}  // namespace chartex
