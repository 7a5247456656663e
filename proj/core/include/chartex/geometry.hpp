#pragma once

#include <array>
#include <cmath>
#include <span>

namespace chartex {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Distance from p to the closed segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Axis-aligned rectangle, (x0,y0) top-left, (x1,y1) bottom-right.
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  Point2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  std::array<Point2, 4> corners() const {
    return {{{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}}};
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

using Quad = std::array<Point2, 4>;  // ordered TL, BL, BR, TR

/// 3x3 projective transform, row-major. Normalized so m[8] == 1 whenever
/// |m[8]| > 1e-8, otherwise to unit Frobenius norm.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography identity() { return {}; }
  double at(int row, int col) const { return m[row * 3 + col]; }
  friend bool operator==(const Homography&, const Homography&) = default;
};

/// Chart frame targets of §-canonicalization: TL, BL, BR, TR.
inline Quad unit_square_corners() {
  return {{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
}

/// Solves the exact 4-point homography with apply(H, src[i]) == dst[i].
/// Direct linear transform on Hartley-normalized coordinates; an 8x8
/// partial-pivot solve with a null-space fallback when the pivot underflows.
/// Throws errc::degenerate_corners when three source or destination points
/// are collinear (triangle area below 1e-9 of the bounding-box area).
Homography solve_from_corners(const Quad& src, const Quad& dst);

/// Projective action. Throws errc::point_at_infinity when |w| <= 1e-12.
Point2 apply(const Homography& h, Point2 p);

/// Throws errc::singular_matrix.
Homography invert(const Homography& h);

/// a then b, i.e. apply(compose(b, a), p) == apply(b, apply(a, p)).
Homography compose(const Homography& b, const Homography& a);

/// Homography sending the chart corners (TL, BL, BR, TR) to
/// (0,0), (0,1), (1,1), (1,0).
Homography canonicalize(const Quad& corners);

}  // namespace chartex
