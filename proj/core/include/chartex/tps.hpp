#pragma once

#include <chartex/geometry.hpp>

#include <span>
#include <vector>

namespace chartex {

/// Thin-plate-spline interpolant through displaced control points, with the
/// r^2 log r kernel. Maps source coordinates to warped coordinates and
/// reproduces every control displacement exactly.
class ThinPlateSpline {
 public:
  /// Fits the interpolant with f(controls[i]) == targets[i].
  /// Throws errc::invalid_argument on size mismatch or < 3 controls.
  ThinPlateSpline(std::span<const Point2> controls,
                  std::span<const Point2> targets);

  Point2 evaluate(Point2 p) const;

  /// Solves f(q) = target by fixed-point iteration; accurate for the
  /// small-displacement warps used here.
  Point2 invert(Point2 target, int iterations = 8) const;

  std::span<const Point2> controls() const { return controls_; }

 private:
  std::vector<Point2> controls_;
  std::vector<double> wx_, wy_;  // kernel weights + affine tail (a0, ax, ay)
};

}  // namespace chartex
