#include <chartex/augment.hpp>
#include <chartex/draw.hpp>
#include <chartex/error.hpp>
#include <chartex/quadfit.hpp>
#include <chartex/rng.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace chartex;

namespace {

BinaryMask filled_rect(int w, int h, int x0, int y0, int x1, int y1) {
  BinaryMask mask(w, h);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) mask.set(x, y, true);
  return mask;
}

// Flood-fill oracle: number of 8-connected foreground components.
int count_components(const BinaryMask& mask) {
  std::vector<char> seen(mask.bits.size(), 0);
  int components = 0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y) || seen[size_t(y) * mask.width + x]) continue;
      ++components;
      std::vector<std::pair<int, int>> stack{{x, y}};
      seen[size_t(y) * mask.width + x] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) continue;
            if (!seen[size_t(ny) * mask.width + nx]) {
              seen[size_t(ny) * mask.width + nx] = 1;
              stack.push_back({nx, ny});
            }
          }
      }
    }
  return components;
}

Rect poly_bbox(const Polygon& poly) {
  Rect r{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
  for (const Point2& p : poly) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

// O(n^2) gift-wrapping oracle for hulls.
Polygon gift_wrap(const std::vector<Point2>& pts) {
  const std::size_t n = pts.size();
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pts[i].x < pts[start].x ||
        (pts[i].x == pts[start].x && pts[i].y < pts[start].y))
      start = i;
  Polygon hull;
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    std::size_t next = (cur + 1) % n;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = cross(pts[next] - pts[cur], pts[i] - pts[cur]);
      if (c > 1e-12 ||
          (std::abs(c) <= 1e-12 &&
           distance(pts[cur], pts[i]) > distance(pts[cur], pts[next])))
        next = i;
    }
    cur = next;
  } while (cur != start && hull.size() <= n);
  return hull;
}

bool same_vertex_set(const Polygon& a, const Polygon& b) {
  if (a.size() != b.size()) return false;
  auto key = [](const Polygon& p) {
    std::set<std::pair<double, double>> s;
    for (const Point2& q : p) s.insert({q.x, q.y});
    return s;
  };
  return key(a) == key(b);
}

}  // namespace

TEST_CASE("trace_contours basics") {
  CHECK(trace_contours(BinaryMask(64, 64)).empty());

  const BinaryMask rect = filled_rect(128, 96, 10, 10, 89, 69);
  const auto contours = trace_contours(rect);
  REQUIRE(contours.size() == 1);
  const Rect bbox = poly_bbox(contours[0]);
  CHECK(bbox == Rect{10, 10, 89, 69});
  CHECK(polygon_signed_area(contours[0]) > 0);  // normalized orientation

  BinaryMask two = filled_rect(128, 96, 5, 5, 24, 24);
  for (int y = 50; y <= 80; ++y)
    for (int x = 60; x <= 100; ++x) two.set(x, y, true);
  const auto two_contours = trace_contours(two);
  CHECK(static_cast<int>(two_contours.size()) == count_components(two));
  CHECK(two_contours.size() == 2);
}

TEST_CASE("trace_contours matches flood-fill component count on random blobs") {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMask mask(96, 96);
    const int blobs = int(rng.uniform_int(1, 6));
    for (int b = 0; b < blobs; ++b) {
      const int cx = int(rng.uniform_int(10, 85)), cy = int(rng.uniform_int(10, 85));
      const int r = int(rng.uniform_int(2, 8));
      for (int y = std::max(0, cy - r); y <= std::min(95, cy + r); ++y)
        for (int x = std::max(0, cx - r); x <= std::min(95, cx + r); ++x)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
            mask.set(x, y, true);
    }
    CHECK(static_cast<int>(trace_contours(mask).size()) == count_components(mask));
  }
}

TEST_CASE("largest_contour_by_area") {
  CHECK_THROWS_AS(largest_contour_by_area({}), Error);

  const Polygon small = {{0, 0}, {20, 0}, {20, 20}, {0, 20}};
  const Polygon big = {{0, 0}, {40, 0}, {40, 40}, {0, 40}};
  std::vector<Polygon> contours{small, big};
  CHECK(&largest_contour_by_area(contours) == &contours[1]);

  Rng rng(5);
  std::vector<Polygon> random_polys;
  for (int i = 0; i < 12; ++i) {
    Polygon p;
    const double r = rng.uniform(1, 50);
    for (int k = 0; k < 7; ++k) {
      const double a = 2 * std::numbers::pi * k / 7;
      p.push_back({r * std::cos(a), r * std::sin(a)});
    }
    random_polys.push_back(std::move(p));
  }
  // Brute-force scan oracle.
  std::size_t best = 0;
  for (std::size_t i = 1; i < random_polys.size(); ++i)
    if (std::abs(polygon_signed_area(random_polys[i])) >
        std::abs(polygon_signed_area(random_polys[best])))
      best = i;
  CHECK(&largest_contour_by_area(random_polys) == &random_polys[best]);
}

TEST_CASE("convex_hull") {
  const Polygon square = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  CHECK(same_vertex_set(convex_hull(square), square));

  Polygon with_interior = square;
  with_interior.push_back({5, 5});
  CHECK(same_vertex_set(convex_hull(with_interior), square));

  Rng rng(77);
  Polygon cloud;
  for (int i = 0; i < 100; ++i)
    cloud.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
  const Polygon hull = convex_hull(cloud);
  const Polygon oracle = gift_wrap(cloud);
  CHECK(same_vertex_set(hull, oracle));
  CHECK(polygon_signed_area(hull) > 0);

  const Polygon line = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  try {
    convex_hull(line);
    FAIL("expected DegenerateInput");
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate_input);
  }
}

TEST_CASE("douglas_peucker epsilon zero keeps deduplicated input") {
  const Polygon poly = {{0, 0}, {5, 0.5}, {10, 0}, {10, 10}, {5, 5}, {0, 10}};
  CHECK(douglas_peucker(poly, 0.0) == poly);

  Polygon with_dup = poly;
  with_dup.insert(with_dup.begin() + 2, poly[1]);  // consecutive duplicate
  CHECK(douglas_peucker(with_dup, 0.0) == poly);
}

TEST_CASE("douglas_peucker collapses edge midpoints to corners") {
  const Polygon rect_mids = {{0, 0},  {50, 0},  {100, 0},  {100, 30},
                             {100, 60}, {50, 60}, {0, 60},  {0, 30}};
  const Polygon simplified = douglas_peucker(rect_mids, 1.0);
  const Polygon corners = {{0, 0}, {100, 0}, {100, 60}, {0, 60}};
  CHECK(same_vertex_set(simplified, corners));
}

TEST_CASE("douglas_peucker removed points stay within epsilon") {
  // Noisy circle; every dropped vertex must lie within eps of the kept outline.
  Rng rng(31);
  Polygon circle;
  for (int k = 0; k < 360; ++k) {
    const double a = k * std::numbers::pi / 180;
    const double r = 100 + rng.uniform(-0.4, 0.4);
    circle.push_back({r * std::cos(a), r * std::sin(a)});
  }
  const double eps = 0.5;
  const Polygon simplified = douglas_peucker(circle, eps);
  CHECK(simplified.size() < circle.size());

  // Subset property.
  for (const Point2& v : simplified)
    CHECK(std::find(circle.begin(), circle.end(), v) != circle.end());

  // Point-to-segment scan oracle over the simplified outline.
  for (const Point2& v : circle) {
    if (std::find(simplified.begin(), simplified.end(), v) != simplified.end())
      continue;
    double min_dist = 1e300;
    for (std::size_t i = 0; i < simplified.size(); ++i)
      min_dist = std::min(min_dist,
                          point_segment_distance(
                              v, simplified[i],
                              simplified[(i + 1) % simplified.size()]));
    CHECK(min_dist <= eps);
  }
}

TEST_CASE("douglas_peucker result does not depend on contour start") {
  Rng rng(8);
  Polygon poly;
  for (int k = 0; k < 40; ++k) {
    const double a = 2 * std::numbers::pi * k / 40;
    const double r = 80 + rng.uniform(-3, 3);
    poly.push_back({r * std::cos(a), r * std::sin(a)});
  }
  const Polygon base = douglas_peucker(poly, 2.0);
  for (const std::size_t shift : {5UL, 17UL, 33UL}) {
    Polygon rotated = poly;
    std::rotate(rotated.begin(), rotated.begin() + std::ptrdiff_t(shift),
                rotated.end());
    CHECK(same_vertex_set(douglas_peucker(rotated, 2.0), base));
  }
}

TEST_CASE("select_four_edges on a clean quadrilateral") {
  const Polygon quad = {{10, 10}, {200, 14}, {205, 150}, {8, 140}};
  const auto edges = select_four_edges(quad, 256, 256);
  std::set<std::pair<double, double>> starts;
  for (const Edge& e : edges) starts.insert({e.a.x, e.a.y});
  CHECK(starts.size() == 4);  // every input edge used exactly once
}

TEST_CASE("select_four_edges drops the shorter collinear half") {
  // Top edge split into two collinear halves sharing vertex (120, 10): the
  // halves are "too close" (angle 0, distance 0), so only the longer
  // survives alongside the other three sides.
  const Polygon poly = {{10, 10}, {120, 10}, {210, 10}, {210, 150}, {10, 150}};
  const auto edges = select_four_edges(poly, 256, 256);

  int top_edges = 0;
  bool longer_half = false;
  for (const Edge& e : edges) {
    if (e.a.y == 10 && e.b.y == 10) {
      ++top_edges;
      if (e.length() > 100) longer_half = true;
    }
  }
  CHECK(top_edges == 1);
  CHECK(longer_half);
}

TEST_CASE("select_four_edges matches a step-by-step rule trace on a hexagon") {
  // Irregular hexagon: adjacent edge angles all exceed 20 degrees, so no
  // candidate is ever "too close" and the loop keeps the 4 longest edges.
  const Polygon hex = {{40, 10},  {180, 20}, {230, 90},
                       {190, 170}, {60, 160}, {15, 80}};
  std::vector<Edge> all;
  for (std::size_t i = 0; i < hex.size(); ++i)
    all.push_back({hex[i], hex[(i + 1) % hex.size()]});
  std::sort(all.begin(), all.end(),
            [](const Edge& a, const Edge& b) { return a.length() > b.length(); });

  const auto edges = select_four_edges(hex, 256, 256);
  for (int i = 0; i < 4; ++i) {
    CHECK(edges[size_t(i)].a == all[size_t(i)].a);
    CHECK(edges[size_t(i)].b == all[size_t(i)].b);
  }
}

TEST_CASE("select_four_edges exhausts candidates on a triangle") {
  const Polygon tri = {{0, 0}, {100, 0}, {50, 90}};
  try {
    select_four_edges(tri, 128, 128);
    FAIL("expected InsufficientEdges");
  } catch (const Error& e) {
    CHECK(e.code() == errc::insufficient_edges);
  }
}

TEST_CASE("mask_to_quad on an axis-aligned rectangle") {
  const BinaryMask mask = filled_rect(128, 96, 10, 10, 89, 69);
  const Quad quad = mask_to_quad(mask);
  const Quad expected = {{{10, 10}, {10, 69}, {89, 69}, {89, 10}}};
  for (int i = 0; i < 4; ++i)
    CHECK(distance(quad[size_t(i)], expected[size_t(i)]) < 1.0);
}

TEST_CASE("mask_to_quad recovers a chamfered corner that vanilla DP cannot") {
  // 300x240 rectangle with the top-left corner cut by a 12 px chamfer.
  const int x0 = 50, y0 = 40, x1 = 349, y1 = 279;
  const int cut = 12;
  BinaryMask mask = filled_rect(420, 340, x0, y0, x1, y1);
  for (int y = y0; y < y0 + cut; ++y)
    for (int x = x0; x < x0 + cut; ++x)
      if ((x - x0) + (y - y0) < cut) mask.set(x, y, false);

  const Quad quad = mask_to_quad(mask);
  const Point2 true_corner{double(x0), double(y0)};
  CHECK(distance(quad[0], true_corner) < 1.0);

  // Vanilla Douglas-Peucker keeps a vertex subset of the contour, and every
  // contour pixel is at least cut/sqrt(2) away from the cut-off corner.
  const auto contours = trace_contours(mask);
  const Polygon& contour = largest_contour_by_area(contours);
  const double eps = 0.005 * polygon_perimeter(convex_hull(contour));
  const Polygon dp = douglas_peucker(contour, eps);
  double min_dist = 1e300;
  for (const Point2& v : dp) min_dist = std::min(min_dist, distance(v, true_corner));
  CHECK(min_dist > 3.0);
}

TEST_CASE("mask_to_quad on perspective-warped rectangle masks") {
  Rng rng(606);
  double total_err = 0, max_err = 0;
  int corners_checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Quad rect = {{{80, 100}, {80, 620}, {640, 620}, {640, 100}}};
    RasterImage dummy(720, 720);
    Rng warp_rng(rng.next_u64());
    auto [img, hom] = apply_perspective(dummy, 0.5, warp_rng);
    (void)img;

    Quad warped;
    for (int i = 0; i < 4; ++i) warped[size_t(i)] = apply(hom, rect[size_t(i)]);
    BinaryMask mask(720, 720);
    fill_polygon(mask, warped);

    const Quad quad = mask_to_quad(mask);
    for (int i = 0; i < 4; ++i) {
      const double err = distance(quad[size_t(i)], warped[size_t(i)]);
      total_err += err;
      max_err = std::max(max_err, err);
      ++corners_checked;
    }
  }
  CHECK(total_err / corners_checked < 1.5);
  CHECK(max_err < 4.0);
}

TEST_CASE("mask_to_quad output order is TL BL BR TR") {
  const BinaryMask mask = filled_rect(200, 200, 30, 50, 170, 150);
  const Quad q = mask_to_quad(mask);
  CHECK(q[0].x + q[0].y ==
        doctest::Approx(std::min({q[0].x + q[0].y, q[1].x + q[1].y,
                                  q[2].x + q[2].y, q[3].x + q[3].y})));
  CHECK(q[1].x < q[2].x);  // BL left of BR
  CHECK(q[1].y > q[0].y);  // BL below TL
  CHECK(q[3].y < q[2].y);  // TR above BR
}

TEST_CASE("near-parallel selected edges never produce corners") {
  // Slightly skewed rectangles keep opposite edges nearly parallel; those
  // intersections land far outside the frame and must be filtered out.
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const double skew = rng.uniform(-6, 6);
    const Quad quad = {{{60 + skew, 60}, {60 - skew, 600}, {660 - skew, 600},
                        {660 + skew, 60}}};
    BinaryMask mask(720, 720);
    fill_polygon(mask, quad);
    const Quad corners = mask_to_quad(mask);
    for (const Point2& c : corners) {
      CHECK(c.x > -0.05 * 720);
      CHECK(c.x < 1.05 * 720);
      CHECK(c.y > -0.05 * 720);
      CHECK(c.y < 1.05 * 720);
    }
  }
}
