#include <chartex/quadfit.hpp>

#include <chartex/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace chartex {

double polygon_signed_area(const Polygon& poly) {
  double acc = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return acc / 2;
}

double polygon_perimeter(const Polygon& poly) {
  double acc = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) acc += distance(poly[i], poly[(i + 1) % n]);
  return acc;
}

// ---------------------------------------------------------------------------
// Contour tracing
// ---------------------------------------------------------------------------

namespace {

// 8-neighborhood, clockwise in image coordinates starting east.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

struct Pix {
  int x, y;
  bool operator==(const Pix&) const = default;
};

// Moore boundary tracing with Jacob's stopping criterion. The start pixel
// is the first component pixel in scan order, so its W/NW/N/NE neighbors
// are background.
Polygon trace_from(const BinaryMask& mask, Pix start) {
  auto fg = [&](int x, int y) {
    return mask.in_bounds(x, y) && mask.at(x, y);
  };

  Polygon contour;
  contour.push_back({double(start.x), double(start.y)});

  int first_dir = -1;
  for (int d = 0; d < 8; ++d) {
    if (fg(start.x + kDx[d], start.y + kDy[d])) {
      first_dir = d;
      break;
    }
  }
  if (first_dir < 0) return contour;  // isolated pixel

  Pix cur{start.x + kDx[first_dir], start.y + kDy[first_dir]};
  int prev_move = first_dir;
  while (true) {
    if (cur == start) {
      // Stop when the next move out of `start` repeats the first move.
      int next = -1;
      for (int k = 0; k < 8; ++k) {
        const int d = (prev_move + 6 + k) % 8;
        if (fg(cur.x + kDx[d], cur.y + kDy[d])) {
          next = d;
          break;
        }
      }
      if (next == first_dir) break;
    }
    contour.push_back({double(cur.x), double(cur.y)});
    int move = -1;
    for (int k = 0; k < 8; ++k) {
      const int d = (prev_move + 6 + k) % 8;
      if (fg(cur.x + kDx[d], cur.y + kDy[d])) {
        move = d;
        break;
      }
    }
    cur = {cur.x + kDx[move], cur.y + kDy[move]};
    prev_move = move;
  }
  return contour;
}

void flood_component(const BinaryMask& mask, std::vector<std::uint8_t>& seen,
                     Pix start) {
  std::vector<Pix> stack{start};
  seen[std::size_t(start.y) * mask.width + start.x] = 1;
  while (!stack.empty()) {
    const Pix p = stack.back();
    stack.pop_back();
    for (int d = 0; d < 8; ++d) {
      const int nx = p.x + kDx[d], ny = p.y + kDy[d];
      if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) continue;
      std::uint8_t& flag = seen[std::size_t(ny) * mask.width + nx];
      if (!flag) {
        flag = 1;
        stack.push_back({nx, ny});
      }
    }
  }
}

}  // namespace

std::vector<Polygon> trace_contours(const BinaryMask& mask) {
  std::vector<Polygon> contours;
  std::vector<std::uint8_t> seen(std::size_t(mask.width) * mask.height, 0);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y) || seen[std::size_t(y) * mask.width + x]) continue;
      Polygon c = trace_from(mask, {x, y});
      if (polygon_signed_area(c) < 0) std::reverse(c.begin(), c.end());
      contours.push_back(std::move(c));
      flood_component(mask, seen, {x, y});
    }
  return contours;
}

const Polygon& largest_contour_by_area(const std::vector<Polygon>& contours) {
  if (contours.empty()) raise(errc::empty_input, "no contours");
  std::size_t best = 0;
  double best_area = std::abs(polygon_signed_area(contours[0]));
  for (std::size_t i = 1; i < contours.size(); ++i) {
    const double area = std::abs(polygon_signed_area(contours[i]));
    if (area > best_area) {
      best = i;
      best_area = area;
    }
  }
  return contours[best];
}

// ---------------------------------------------------------------------------
// Convex hull
// ---------------------------------------------------------------------------

Polygon convex_hull(const Polygon& poly) {
  if (poly.size() < 3) raise(errc::degenerate_input, "hull needs >= 3 vertices");
  std::vector<Point2> pts = poly;
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto build = [&](auto begin, auto end) {
    std::vector<Point2> chain;
    for (auto it = begin; it != end; ++it) {
      while (chain.size() >= 2 &&
             cross(chain[chain.size() - 1] - chain[chain.size() - 2],
                   *it - chain[chain.size() - 2]) <= 0)
        chain.pop_back();
      chain.push_back(*it);
    }
    return chain;
  };
  std::vector<Point2> lower = build(pts.begin(), pts.end());
  std::vector<Point2> upper = build(pts.rbegin(), pts.rend());
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  if (lower.size() < 3)
    raise(errc::degenerate_input, "all points collinear");
  if (polygon_signed_area(lower) < 0) std::reverse(lower.begin(), lower.end());
  return lower;
}

// ---------------------------------------------------------------------------
// Douglas-Peucker
// ---------------------------------------------------------------------------

namespace {

Polygon dedup_closed(const Polygon& poly) {
  Polygon out;
  for (const Point2& p : poly)
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

void simplify_chain(const std::vector<Point2>& pts,
                    const std::vector<std::size_t>& chain, std::size_t lo,
                    std::size_t hi, double eps, std::vector<char>& keep) {
  if (hi <= lo + 1) return;
  double dmax = -1;
  std::size_t imax = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d =
        point_segment_distance(pts[chain[i]], pts[chain[lo]], pts[chain[hi]]);
    if (d > dmax) {
      dmax = d;
      imax = i;
    }
  }
  if (dmax >= eps) {
    keep[chain[imax]] = 1;
    simplify_chain(pts, chain, lo, imax, eps, keep);
    simplify_chain(pts, chain, imax, hi, eps, keep);
  }
}

}  // namespace

Polygon douglas_peucker(const Polygon& poly, double epsilon) {
  const Polygon pts = dedup_closed(poly);
  const std::size_t n = pts.size();
  if (n <= 3) return pts;

  // Anchor the closed curve at its diameter pair so the result does not
  // depend on where the contour happens to start.
  std::size_t ia = 0, ib = 1;
  double best = -1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 d = pts[i] - pts[j];
      const double d2 = dot(d, d);
      if (d2 > best) {
        best = d2;
        ia = i;
        ib = j;
      }
    }

  std::vector<char> keep(n, 0);
  keep[ia] = keep[ib] = 1;
  std::vector<std::size_t> chain;
  for (std::size_t i = ia;; i = (i + 1) % n) {
    chain.push_back(i);
    if (i == ib) break;
  }
  simplify_chain(pts, chain, 0, chain.size() - 1, epsilon, keep);
  chain.clear();
  for (std::size_t i = ib;; i = (i + 1) % n) {
    chain.push_back(i);
    if (i == ia) break;
  }
  simplify_chain(pts, chain, 0, chain.size() - 1, epsilon, keep);

  Polygon out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Edge selection and corner recovery
// ---------------------------------------------------------------------------

namespace {

double edge_angle_deg(const Edge& e, const Edge& g) {
  const Point2 de = e.b - e.a, dg = g.b - g.a;
  const double denom = norm(de) * norm(dg);
  if (denom <= 0) return 0;
  const double c = std::clamp(std::abs(dot(de, dg)) / denom, 0.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

double edge_min_point_distance(const Edge& e, const Edge& g) {
  const Point2 mid_e = 0.5 * (e.a + e.b);
  const Point2 mid_g = 0.5 * (g.a + g.b);
  double d = point_segment_distance(e.a, g.a, g.b);
  d = std::min(d, point_segment_distance(e.b, g.a, g.b));
  d = std::min(d, point_segment_distance(mid_e, g.a, g.b));
  d = std::min(d, point_segment_distance(g.a, e.a, e.b));
  d = std::min(d, point_segment_distance(g.b, e.a, e.b));
  d = std::min(d, point_segment_distance(mid_g, e.a, e.b));
  return d;
}

}  // namespace

std::array<Edge, 4> select_four_edges(const Polygon& poly, int image_w,
                                      int image_h) {
  const Polygon pts = dedup_closed(poly);
  std::vector<Edge> edges;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Edge e{pts[i], pts[(i + 1) % n]};
    if (e.length() > 0) edges.push_back(e);
  }
  if (edges.size() < 4)
    raise(errc::insufficient_edges, "polygon has fewer than 4 edges");

  const double close_dist = std::min(image_w, image_h) / 28.0;
  std::array<Edge, 4> out;
  std::vector<char> alive(edges.size(), 1);
  for (int picked = 0; picked < 4; ++picked) {
    int best = -1;
    double best_len = -1;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (alive[i] && edges[i].length() > best_len) {
        best = static_cast<int>(i);
        best_len = edges[i].length();
      }
    if (best < 0)
      raise(errc::insufficient_edges,
            "edge candidates exhausted before reaching 4");
    const Edge e = edges[std::size_t(best)];
    out[std::size_t(picked)] = e;
    alive[std::size_t(best)] = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      if (edge_angle_deg(e, edges[i]) < 20.0 &&
          edge_min_point_distance(e, edges[i]) < close_dist)
        alive[i] = 0;
    }
  }
  return out;
}

Quad mask_to_quad(const BinaryMask& mask) {
  const auto contours = trace_contours(mask);
  const Polygon& contour = largest_contour_by_area(contours);
  const Polygon hull = convex_hull(contour);
  const double epsilon = 0.005 * polygon_perimeter(hull);
  const Polygon approx = douglas_peucker(contour, epsilon);
  const auto edges = select_four_edges(approx, mask.width, mask.height);

  const double margin_x = 0.05 * mask.width, margin_y = 0.05 * mask.height;
  std::vector<Point2> pts;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const Point2 d1 = edges[std::size_t(i)].b - edges[std::size_t(i)].a;
      const Point2 d2 = edges[std::size_t(j)].b - edges[std::size_t(j)].a;
      const double denom = cross(d1, d2);
      if (std::abs(denom) <= 1e-12 * norm(d1) * norm(d2)) continue;
      const double t =
          cross(edges[std::size_t(j)].a - edges[std::size_t(i)].a, d2) / denom;
      const Point2 p = edges[std::size_t(i)].a + t * d1;
      if (p.x < -margin_x || p.x > (mask.width - 1) + margin_x ||
          p.y < -margin_y || p.y > (mask.height - 1) + margin_y)
        continue;
      pts.push_back(p);
    }
  if (pts.size() != 4)
    raise(errc::bad_intersections,
          "expected 4 in-frame corner intersections, got " +
              std::to_string(pts.size()));

  Point2 centroid{0, 0};
  for (const Point2& p : pts) centroid = centroid + 0.25 * p;
  std::sort(pts.begin(), pts.end(), [&](Point2 a, Point2 b) {
    return std::atan2(a.y - centroid.y, a.x - centroid.x) >
           std::atan2(b.y - centroid.y, b.x - centroid.x);
  });
  std::size_t tl = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (pts[i].x + pts[i].y < pts[tl].x + pts[tl].y) tl = i;
  std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(tl),
              pts.end());
  return {pts[0], pts[1], pts[2], pts[3]};
}

}  // namespace chartex
