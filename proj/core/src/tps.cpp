#include <chartex/tps.hpp>

#include <chartex/error.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace chartex {

namespace {

inline double kernel(double r2) {
  // U(r) = r^2 log r, with U(0) = 0.
  return r2 > 0 ? 0.5 * r2 * std::log(r2) : 0.0;
}

}  // namespace

ThinPlateSpline::ThinPlateSpline(std::span<const Point2> controls,
                                 std::span<const Point2> targets) {
  const std::size_t n = controls.size();
  if (n != targets.size() || n < 3)
    raise(errc::invalid_argument, "TPS needs >= 3 matched control points");
  controls_.assign(controls.begin(), controls.end());

  const auto dim = static_cast<Eigen::Index>(n) + 3;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd bx = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd by = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Point2 d = controls_[i] - controls_[j];
      sys(Eigen::Index(i), Eigen::Index(j)) = kernel(dot(d, d));
    }
    sys(Eigen::Index(i), Eigen::Index(n)) = 1;
    sys(Eigen::Index(i), Eigen::Index(n) + 1) = controls_[i].x;
    sys(Eigen::Index(i), Eigen::Index(n) + 2) = controls_[i].y;
    sys(Eigen::Index(n), Eigen::Index(i)) = 1;
    sys(Eigen::Index(n) + 1, Eigen::Index(i)) = controls_[i].x;
    sys(Eigen::Index(n) + 2, Eigen::Index(i)) = controls_[i].y;
    bx(Eigen::Index(i)) = targets[i].x;
    by(Eigen::Index(i)) = targets[i].y;
  }

  const auto lu = sys.partialPivLu();
  const Eigen::VectorXd sx = lu.solve(bx);
  const Eigen::VectorXd sy = lu.solve(by);
  wx_.assign(sx.data(), sx.data() + dim);
  wy_.assign(sy.data(), sy.data() + dim);
}

Point2 ThinPlateSpline::evaluate(Point2 p) const {
  const std::size_t n = controls_.size();
  double x = wx_[n] + wx_[n + 1] * p.x + wx_[n + 2] * p.y;
  double y = wy_[n] + wy_[n + 1] * p.x + wy_[n + 2] * p.y;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 d = p - controls_[i];
    const double u = kernel(dot(d, d));
    x += wx_[i] * u;
    y += wy_[i] * u;
  }
  return {x, y};
}

Point2 ThinPlateSpline::invert(Point2 target, int iterations) const {
  Point2 p = target;
  for (int it = 0; it < iterations; ++it) {
    const Point2 err = evaluate(p) - target;
    p = p - err;
  }
  return p;
}

}  // namespace chartex
