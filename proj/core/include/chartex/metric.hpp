#pragma once

#include <chartex/geometry.hpp>

#include <span>
#include <vector>

namespace chartex {

enum class ToleranceKind { relative, absolute };

struct Tolerance {
  ToleranceKind kind = ToleranceKind::relative;
  double magnitude = 0.05;  // 0.05 relative, or data units when absolute
  /// Absolute-tolerance profiles with fixed tick bins (audiogram
  /// frequencies) match x exactly instead of within magnitude.
  bool categorical_x = false;
};

/// Greedy one-to-one point matching between a predicted and a ground-truth
/// line. Predicted points are visited in x order; each takes the feasible
/// unmatched ground-truth point with the closest x (ties on |dy|, then
/// index). A pair is feasible when both coordinate deltas pass the
/// tolerance; the relative rule is
///   |delta| <= magnitude * max(min(|pred|, |gt|), span)
/// per coordinate, where span is the larger coordinate span of the two
/// lines. The span floor keeps values at or near zero matchable (5% of
/// exactly 0 would otherwise never match) and is symmetric in pred/gt; the
/// boundary is inclusive.
int match_line(std::span<const Point2> pred, std::span<const Point2> gt,
               const Tolerance& tol);

struct MatchReport {
  double precision = 0;  // [0, 1]
  double recall = 0;     // [0, 1]
  double f1 = 0;         // [0, 100], 200 * P * R / (P + R)
  std::vector<int> line_assignment;  // per predicted line: gt index or -1
  std::vector<int> per_line_tp;      // per predicted line
  long long tp = 0;
  long long pred_points = 0;
  long long gt_points = 0;
};

/// F1 on the 0-100 scale; 0 when both counts are empty of matches.
double f1_from_counts(long long tp, long long pred_points, long long gt_points);

/// Best-correspondence multi-line evaluation: enumerates all injective
/// line assignments (nulls allowed) and keeps the one maximizing total
/// true positives. Throws errc::too_many_lines above 6 lines per side.
MatchReport evaluate(const std::vector<std::vector<Point2>>& pred,
                     const std::vector<std::vector<Point2>>& gt,
                     const Tolerance& tol);

}  // namespace chartex
