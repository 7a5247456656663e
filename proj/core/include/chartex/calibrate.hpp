#pragma once

#include <chartex/detect.hpp>
#include <chartex/geometry.hpp>
#include <chartex/grouping.hpp>

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace chartex {

/// Tick text to float: optional sign, decimals, thousands commas stripped,
/// trailing '%' divides by 100, trailing 'k'/'K' multiplies by 1000.
/// Throws errc::unparseable_text.
double parse_tick_text(std::string_view text);

struct ParsedLabel {
  double canonical_coord = 0;  // x for x-labels, y for y-labels
  double value = 0;
  int detection_id = -1;
};

/// value(coord) = a * coord + b, or 10^(a * coord + b) when log_scale.
struct AxisModel {
  double a = 1;
  double b = 0;
  bool log_scale = false;
  std::vector<int> inlier_ids;

  double value_at(double coord) const;
  double coord_of(double value) const;
};

/// Splits label detections between the axes by border proximity in the
/// canonical frame: canonical y within 0.15 of {0, 1} -> x axis, canonical
/// x within 0.15 of {0, 1} -> y axis; labels qualifying for both or
/// neither, or falling outside [-0.3, 1.3], are discarded.
std::pair<std::vector<ParsedLabel>, std::vector<ParsedLabel>> assign_axes(
    std::span<const Detection> detections, const Homography& to_canonical);

/// Exhaustive minimal-set consensus over label pairs. A candidate model's
/// inliers are labels within 20% of the model's own median per-tick value
/// increment; the best model (most inliers, then least absolute residual)
/// is refit by least squares on its inliers. With log_scale the fit runs
/// against log10(value) and non-positive values are excluded up front.
/// Throws errc::insufficient_labels / errc::no_consensus.
AxisModel fit_axis(std::span<const ParsedLabel> labels, bool log_scale);

enum class GroupingMode { automatic, cluster, classify };

struct ExtractParams {
  bool log_x = false;  // domain prior, e.g. audiogram-style charts
  GroupingMode grouping_mode = GroupingMode::automatic;
  GroupingParams grouping;
  double cluster_threshold = 0.5;
};

struct SeriesExtraction {
  std::vector<std::vector<Point2>> lines;  // data units, ordered by x
  std::vector<double> line_confidence;
  double confidence = 0;  // product of the two axis inlier fractions
  AxisModel x_axis;
  AxisModel y_axis;
  Quad corners;
};

/// Full post-processing: resolve corners (keypoints directly, mask through
/// quad fitting), canonicalize, assign and parse labels, consensus-fit both
/// axes, group marks, and map mark centers to data units. Errors from any
/// stage are rethrown tagged with the stage name ("corners", "axes",
/// "fit_x", "fit_y", "grouping").
SeriesExtraction extract_series(const DetectionSet& detections,
                                const ExtractParams& params);

}  // namespace chartex
