#pragma once

#include <chartex/geometry.hpp>
#include <chartex/image.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chartex {

enum class LabelFormat { plain, percent, k_suffix };
enum class MarkStyle { circle, triangle, cross, diamond, square, plus, star };
enum class LineStyle { solid, dot, dash, dash_dot };
enum class AxisKind { x, y };

struct AxisSpec {
  double start = 0.0;
  double stride = 1.0;        // additive stride; tick ratio when the axis is log
  int decimals = 0;           // decimal places of start/stride, for exact labels
  LabelFormat label_format = LabelFormat::plain;
};

/// Value of tick `index`; arithmetic progression, geometric when log_scale.
/// Linear ticks are computed in scaled integer arithmetic so each value is
/// the correctly rounded double of its decimal label.
double tick_value(const AxisSpec& axis, int index, bool log_scale = false);

/// Renders a value as tick text ("0.2", "50%", "5k"). Throws
/// errc::inadmissible_format when the format cannot represent the value
/// exactly (percent needs |v| < 1, k needs a multiple of 1000 >= 1000).
std::string format_tick_label(double value, LabelFormat format);

struct SeriesPoint {
  int tick_index = 0;
  double y_value = 0.0;
};

struct SeriesSpec {
  MarkStyle mark_style = MarkStyle::circle;
  LineStyle line_style = LineStyle::solid;
  Rgb color{0, 0, 0};
  std::vector<SeriesPoint> points;  // exactly one per x tick
};

struct ChartSpec {
  std::uint64_t seed = 0;
  int width = 720;
  int height = 720;
  double aspect_ratio = 0.75;  // plot height / plot width, in [0.25, 1.0]
  int num_ticks_x = 6;
  int num_ticks_y = 6;
  AxisSpec x_axis;
  AxisSpec y_axis;
  bool grid = true;
  bool log_x = false;
  std::vector<SeriesSpec> series;  // 1..3
};

struct LabelAnnotation {
  Rect box;
  std::string text;
  double value = 0.0;
  AxisKind axis = AxisKind::x;
};

struct MarkAnnotation {
  Rect box;
  int series_id = 0;
  Point2 data_point;
};

struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<std::vector<Point2>> raw_series;  // data units
  std::vector<LabelAnnotation> labels;
  std::vector<MarkAnnotation> marks;
  Quad corners;  // axes rectangle, TL BL BR TR
  std::optional<Homography> applied_homography;
};

struct StrideOption {
  double stride = 1.0;
  int decimals = 0;
};

struct AxisOptions {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<StrideOption> strides;  // ratios when the profile is log-x
};

struct DomainProfile {
  std::string name = "general";
  std::vector<AxisOptions> x_options;
  std::vector<AxisOptions> y_options;
  int min_ticks = 5;
  int max_ticks = 10;
  int min_series = 1;
  int max_series = 3;
  std::vector<MarkStyle> mark_styles;
  std::vector<LineStyle> line_styles;
  bool log_x = false;

  static DomainProfile general();
  /// Log-frequency x axis and a dB-style y axis, two mark styles.
  static DomainProfile audiogram_like();
  /// "general" or "audiogram"; throws errc::invalid_argument.
  static DomainProfile by_name(std::string_view name);
};

/// Deterministic in (master_seed, index, profile).
ChartSpec sample_spec(std::uint64_t master_seed, std::uint64_t index,
                      const DomainProfile& profile);

/// Rasterizes the chart and produces exact annotations. Pure function of
/// the spec; identical specs give byte-identical images.
std::pair<RasterImage, GroundTruth> render_chart(const ChartSpec& spec);

}  // namespace chartex
