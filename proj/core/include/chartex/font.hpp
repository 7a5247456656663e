#pragma once

#include <chartex/draw.hpp>

#include <string_view>

namespace chartex {

/// Minimal stroke-segment font covering the tick-label alphabet
/// "0123456789.-%k,". Glyphs are segment lists on a 4x6 unit cell;
/// `size_px` is the rendered cell height.

bool font_has_glyph(char c);

/// Layout width of `text` at the given size (no stroke padding).
double text_width(std::string_view text, double size_px);

/// Draws `text` with its layout box anchored at `top_left`; returns the
/// painted extent. Unknown characters advance without painting.
PaintBounds draw_text(RasterImage& img, std::string_view text, Point2 top_left,
                      double size_px, Rgb color);

}  // namespace chartex
