#include <chartex/geometry.hpp>

#include <chartex/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace chartex {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kInfinityTol = 1e-12;
constexpr double kNormalizeTol = 1e-8;

// Similarity transform moving the centroid to the origin and the mean
// distance to sqrt(2) (Hartley preconditioning).
struct Similarity {
  double scale = 1.0;
  Point2 shift{0, 0};

  Point2 forward(Point2 p) const {
    return {(p.x - shift.x) * scale, (p.y - shift.y) * scale};
  }
};

Similarity normalizer(const Quad& pts) {
  Point2 centroid{0, 0};
  for (const auto& p : pts) centroid = centroid + 0.25 * p;
  double mean_dist = 0;
  for (const auto& p : pts) mean_dist += 0.25 * distance(p, centroid);
  Similarity s;
  s.shift = centroid;
  s.scale = mean_dist > 0 ? std::numbers::sqrt2 / mean_dist : 1.0;
  return s;
}

void check_not_collinear(const Quad& pts, const char* which) {
  double min_x = pts[0].x, max_x = pts[0].x;
  double min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double bbox_area = (max_x - min_x) * (max_y - min_y);
  const double tol = 1e-9 * std::max(bbox_area, 1e-300);
  for (int skip = 0; skip < 4; ++skip) {
    Point2 tri[3];
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) tri[k++] = pts[i];
    const double area =
        0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
    if (area < tol)
      raise(errc::degenerate_corners,
            std::string("three collinear points in ") + which + " quad");
  }
}

Homography normalized(std::array<double, 9> m) {
  if (std::abs(m[8]) > kNormalizeTol) {
    const double inv = 1.0 / m[8];
    for (double& v : m) v *= inv;
  } else {
    double frob = 0;
    for (double v : m) frob += v * v;
    frob = std::sqrt(frob);
    if (frob <= 0) raise(errc::singular_matrix, "zero homography matrix");
    for (double& v : m) v /= frob;
  }
  return Homography{m};
}

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

// Gaussian elimination with partial pivoting on the 8x8 system fixing
// h33 = 1. Returns false on pivot underflow (h33 of the true solution is
// ~0, or the correspondences are degenerate).
bool solve_8x8(std::array<std::array<double, 9>, 8>& aug,
               std::array<double, 8>& out) {
  double max_entry = 0;
  for (const auto& row : aug)
    for (int c = 0; c < 8; ++c) max_entry = std::max(max_entry, std::abs(row[c]));
  const double pivot_floor = kPivotTol * std::max(max_entry, 1.0);

  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    if (std::abs(aug[pivot][col]) < pivot_floor) return false;
    std::swap(aug[col], aug[pivot]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = aug[r][col] / aug[col][col];
      if (f == 0) continue;
      for (int c = col; c < 9; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  for (int row = 7; row >= 0; --row) {
    double acc = aug[row][8];
    for (int c = row + 1; c < 8; ++c) acc -= aug[row][c] * out[c];
    out[row] = acc / aug[row][row];
  }
  return true;
}

// Null-space DLT for the h33 ~ 0 case: smallest singular vector of the
// 8x9 constraint matrix.
std::array<double, 9> solve_nullspace(const Quad& src, const Quad& dst) {
  Eigen::Matrix<double, 8, 9> a = Eigen::Matrix<double, 8, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const double x = src[i].x, y = src[i].y;
    const double u = dst[i].x, v = dst[i].y;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y, -v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const auto h = svd.matrixV().col(8);
  std::array<double, 9> m;
  for (int i = 0; i < 9; ++i) m[i] = h(i);
  return m;
}

}  // namespace

Homography solve_from_corners(const Quad& src, const Quad& dst) {
  check_not_collinear(src, "source");
  check_not_collinear(dst, "destination");

  const Similarity ts = normalizer(src);
  const Similarity td = normalizer(dst);
  Quad ns, nd;
  for (int i = 0; i < 4; ++i) {
    ns[i] = ts.forward(src[i]);
    nd[i] = td.forward(dst[i]);
  }

  std::array<std::array<double, 9>, 8> aug{};
  for (int i = 0; i < 4; ++i) {
    const double x = ns[i].x, y = ns[i].y;
    const double u = nd[i].x, v = nd[i].y;
    aug[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    aug[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }

  std::array<double, 9> hn;
  std::array<double, 8> solved;
  if (solve_8x8(aug, solved)) {
    std::copy(solved.begin(), solved.end(), hn.begin());
    hn[8] = 1.0;
  } else {
    hn = solve_nullspace(ns, nd);
  }

  // Undo the preconditioning: H = Td^-1 * Hn * Ts.
  const std::array<double, 9> ts_m = {ts.scale, 0, -ts.scale * ts.shift.x,
                                      0, ts.scale, -ts.scale * ts.shift.y,
                                      0, 0, 1};
  const double inv_d = 1.0 / td.scale;
  const std::array<double, 9> td_inv = {inv_d, 0, td.shift.x,
                                        0, inv_d, td.shift.y,
                                        0, 0, 1};
  auto mul = [](const std::array<double, 9>& a, const std::array<double, 9>& b) {
    std::array<double, 9> r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) r[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
    return r;
  };

  Homography h = normalized(mul(td_inv, mul(hn, ts_m)));
  if (std::abs(det3(h.m)) <= kPivotTol)
    raise(errc::degenerate_corners, "correspondences produce a singular map");
  return h;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

Point2 apply(const Homography& h, Point2 p) {
  const double w = h.m[6] * p.x + h.m[7] * p.y + h.m[8];
  if (std::abs(w) <= kInfinityTol)
    raise(errc::point_at_infinity, "point maps to infinity");
  return {(h.m[0] * p.x + h.m[1] * p.y + h.m[2]) / w,
          (h.m[3] * p.x + h.m[4] * p.y + h.m[5]) / w};
}

Homography invert(const Homography& h) {
  const auto& m = h.m;
  const double det = det3(m);
  if (std::abs(det) <= kPivotTol)
    raise(errc::singular_matrix, "homography is not invertible");
  const std::array<double, 9> adj = {
      m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8],
      m[1] * m[5] - m[2] * m[4], m[5] * m[6] - m[3] * m[8],
      m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
      m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7],
      m[0] * m[4] - m[1] * m[3]};
  std::array<double, 9> inv;
  for (int i = 0; i < 9; ++i) inv[i] = adj[i] / det;
  return normalized(inv);
}

Homography compose(const Homography& b, const Homography& a) {
  std::array<double, 9> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i * 3 + j] += b.m[i * 3 + k] * a.m[k * 3 + j];
  return normalized(r);
}

Homography canonicalize(const Quad& corners) {
  return solve_from_corners(corners, unit_square_corners());
}

}  // namespace chartex
