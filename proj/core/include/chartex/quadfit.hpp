#pragma once

#include <chartex/geometry.hpp>
#include <chartex/image.hpp>

#include <array>
#include <vector>

namespace chartex {

/// Implicitly closed vertex list, counterclockwise by the image-frame
/// shoelace sign (positive signed area with y pointing down).
using Polygon = std::vector<Point2>;

/// Signed shoelace area in image coordinates.
double polygon_signed_area(const Polygon& poly);

/// Perimeter of the closed polygon.
double polygon_perimeter(const Polygon& poly);

/// Moore boundary tracing: one outer contour per 8-connected foreground
/// component, vertices on boundary pixel centers. Empty mask gives an
/// empty list.
std::vector<Polygon> trace_contours(const BinaryMask& mask);

/// Largest |shoelace area|, ties broken by first occurrence.
/// Throws errc::empty_input.
const Polygon& largest_contour_by_area(const std::vector<Polygon>& contours);

/// Monotone-chain hull, minimal vertex set. Throws errc::degenerate_input
/// when all points are collinear.
Polygon convex_hull(const Polygon& poly);

/// Classic simplification on the closed polygon (anchored at its diameter
/// pair). Output vertices are always a subset of the input vertices;
/// every removed vertex lies within epsilon of the simplified outline.
Polygon douglas_peucker(const Polygon& poly, double epsilon);

struct Edge {
  Point2 a, b;
  double length() const { return distance(a, b); }
};

/// Repeatedly keeps the longest remaining edge and discards edges too close
/// to it: inter-edge angle < 20 degrees and min distance from the ends or
/// midpoint of either edge to the other segment < min(w, h) / 28.
/// Throws errc::insufficient_edges.
std::array<Edge, 4> select_four_edges(const Polygon& poly, int image_w,
                                      int image_h);

/// Full corner recovery: contour -> largest -> Douglas-Peucker at 0.5% of
/// the hull perimeter -> 4 edges -> supporting-line intersections filtered
/// to the image frame (5% margin) -> angle sort, top-left (min x+y) first.
/// Returns TL, BL, BR, TR. Throws errc::insufficient_edges or
/// errc::bad_intersections.
Quad mask_to_quad(const BinaryMask& mask);

}  // namespace chartex
