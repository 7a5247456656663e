#include <chartex/metric.hpp>

#include <chartex/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace chartex {

namespace {

struct Span2 {
  double x = 0, y = 0;
};

Span2 coordinate_span(std::span<const Point2> pts) {
  if (pts.empty()) return {};
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const Point2& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  return {max_x - min_x, max_y - min_y};
}

bool within(double pred, double gt, double magnitude, ToleranceKind kind,
            double span_floor) {
  const double delta = std::abs(pred - gt);
  if (kind == ToleranceKind::absolute) return delta <= magnitude;
  const double scale = std::max(std::min(std::abs(pred), std::abs(gt)), span_floor);
  return delta <= magnitude * scale;
}

bool x_matches(double px, double gx, const Tolerance& tol, double span_floor) {
  if (tol.categorical_x)
    return std::abs(px - gx) <= 1e-6 * std::max(1.0, std::abs(gx));
  return within(px, gx, tol.magnitude, tol.kind, span_floor);
}

}  // namespace

int match_line(std::span<const Point2> pred, std::span<const Point2> gt,
               const Tolerance& tol) {
  if (pred.empty() || gt.empty()) return 0;
  const Span2 span_pred = coordinate_span(pred);
  const Span2 span_gt = coordinate_span(gt);
  const double floor_x = std::max(span_pred.x, span_gt.x);
  const double floor_y = std::max(span_pred.y, span_gt.y);

  std::vector<std::size_t> order(pred.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred[a].x < pred[b].x;
  });

  std::vector<char> used(gt.size(), 0);
  int tp = 0;
  for (const std::size_t pi : order) {
    const Point2 p = pred[pi];
    int best = -1;
    double best_dx = std::numeric_limits<double>::infinity();
    double best_dy = std::numeric_limits<double>::infinity();
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
      if (used[gi]) continue;
      const Point2 g = gt[gi];
      if (!x_matches(p.x, g.x, tol, floor_x)) continue;
      if (!within(p.y, g.y, tol.magnitude, tol.kind, floor_y)) continue;
      const double dx = std::abs(p.x - g.x), dy = std::abs(p.y - g.y);
      if (dx < best_dx || (dx == best_dx && dy < best_dy)) {
        best = static_cast<int>(gi);
        best_dx = dx;
        best_dy = dy;
      }
    }
    if (best >= 0) {
      used[std::size_t(best)] = 1;
      ++tp;
    }
  }
  return tp;
}

double f1_from_counts(long long tp, long long pred_points, long long gt_points) {
  if (pred_points == 0 && gt_points == 0) return 100.0;  // vacuously perfect
  const double precision = pred_points > 0 ? double(tp) / double(pred_points) : 0.0;
  const double recall = gt_points > 0 ? double(tp) / double(gt_points) : 0.0;
  if (precision + recall <= 0) return 0.0;
  return 200.0 * precision * recall / (precision + recall);
}

namespace {

void enumerate_assignments(const std::vector<std::vector<int>>& tp_table,
                           std::size_t pred_idx, std::vector<char>& gt_used,
                           std::vector<int>& current, int acc,
                           std::vector<int>& best_assign, int& best_tp) {
  const std::size_t n_pred = tp_table.size();
  if (pred_idx == n_pred) {
    if (acc > best_tp) {
      best_tp = acc;
      best_assign = current;
    }
    return;
  }
  const std::size_t n_gt = tp_table[pred_idx].size();
  for (std::size_t g = 0; g < n_gt; ++g) {
    if (gt_used[g]) continue;
    gt_used[g] = 1;
    current[pred_idx] = static_cast<int>(g);
    enumerate_assignments(tp_table, pred_idx + 1, gt_used, current,
                          acc + tp_table[pred_idx][g], best_assign, best_tp);
    gt_used[g] = 0;
  }
  current[pred_idx] = -1;  // leave this predicted line unassigned
  enumerate_assignments(tp_table, pred_idx + 1, gt_used, current, acc,
                        best_assign, best_tp);
}

}  // namespace

MatchReport evaluate(const std::vector<std::vector<Point2>>& pred,
                     const std::vector<std::vector<Point2>>& gt,
                     const Tolerance& tol) {
  if (pred.size() > 6 || gt.size() > 6)
    raise(errc::too_many_lines,
          "assignment enumeration supports at most 6 lines per side");

  std::vector<std::vector<int>> tp_table(pred.size(),
                                         std::vector<int>(gt.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = 0; j < gt.size(); ++j)
      tp_table[i][j] = match_line(pred[i], gt[j], tol);

  std::vector<char> gt_used(gt.size(), 0);
  std::vector<int> current(pred.size(), -1);
  std::vector<int> best_assign(pred.size(), -1);
  int best_tp = -1;
  enumerate_assignments(tp_table, 0, gt_used, current, 0, best_assign, best_tp);
  if (best_tp < 0) best_tp = 0;

  MatchReport report;
  report.line_assignment = best_assign;
  report.tp = best_tp;
  for (const auto& line : pred) report.pred_points += std::ssize(line);
  for (const auto& line : gt) report.gt_points += std::ssize(line);
  report.per_line_tp.assign(pred.size(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (best_assign[i] >= 0)
      report.per_line_tp[i] = tp_table[i][std::size_t(best_assign[i])];
  report.precision =
      report.pred_points > 0 ? double(report.tp) / double(report.pred_points) : 0;
  report.recall =
      report.gt_points > 0 ? double(report.tp) / double(report.gt_points) : 0;
  report.f1 = f1_from_counts(report.tp, report.pred_points, report.gt_points);
  return report;
}

}  // namespace chartex
