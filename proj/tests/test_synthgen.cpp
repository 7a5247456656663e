#include <chartex/calibrate.hpp>
#include <chartex/error.hpp>
#include <chartex/synthgen.hpp>

#include <doctest.h>

#include <cmath>

using namespace chartex;

namespace {

// True axis mappings implied by the ground truth: canonical x in [0, 1]
// spans the tick values left to right, canonical y spans them bottom to top.
struct TrueAxes {
  double x_first, x_last, y_first, y_last;
  bool log_x;

  double x_value(double cx) const {
    if (!log_x) return x_first + cx * (x_last - x_first);
    const double t =
        std::log10(x_first) + cx * (std::log10(x_last) - std::log10(x_first));
    return std::pow(10.0, t);
  }
  double y_value(double cy) const { return y_last + cy * (y_first - y_last); }
};

TrueAxes true_axes(const ChartSpec& spec) {
  return {tick_value(spec.x_axis, 0, spec.log_x),
          tick_value(spec.x_axis, spec.num_ticks_x - 1, spec.log_x),
          tick_value(spec.y_axis, 0),
          tick_value(spec.y_axis, spec.num_ticks_y - 1),
          spec.log_x};
}

}  // namespace

TEST_CASE("sample_spec stays within the randomized parameter ranges") {
  const DomainProfile profile = DomainProfile::general();
  for (int i = 0; i < 50; ++i) {
    const ChartSpec spec = sample_spec(7, std::uint64_t(i), profile);
    CHECK(spec.num_ticks_x >= 5);
    CHECK(spec.num_ticks_x <= 10);
    CHECK(spec.num_ticks_y >= 5);
    CHECK(spec.num_ticks_y <= 10);
    CHECK(spec.series.size() >= 1);
    CHECK(spec.series.size() <= 3);
    CHECK(spec.aspect_ratio >= 0.25);
    CHECK(spec.aspect_ratio <= 1.0);
    CHECK_FALSE(spec.log_x);
    for (const SeriesSpec& s : spec.series)
      CHECK(s.points.size() == std::size_t(spec.num_ticks_x));
  }
}

TEST_CASE("sample_spec is deterministic") {
  const DomainProfile profile = DomainProfile::general();
  const ChartSpec a = sample_spec(7, 0, profile);
  const ChartSpec b = sample_spec(7, 0, profile);
  CHECK(a.seed == b.seed);
  CHECK(a.aspect_ratio == b.aspect_ratio);
  CHECK(a.num_ticks_x == b.num_ticks_x);
  CHECK(a.grid == b.grid);
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t s = 0; s < a.series.size(); ++s) {
    CHECK(a.series[s].color == b.series[s].color);
    for (std::size_t i = 0; i < a.series[s].points.size(); ++i)
      CHECK(a.series[s].points[i].y_value == b.series[s].points[i].y_value);
  }
  const ChartSpec c = sample_spec(7, 1, profile);
  CHECK(c.aspect_ratio != a.aspect_ratio);
}

TEST_CASE("audiogram-like profile generates log-x specs") {
  const DomainProfile profile = DomainProfile::audiogram_like();
  for (int i = 0; i < 10; ++i) {
    const ChartSpec spec = sample_spec(7, std::uint64_t(i), profile);
    CHECK(spec.log_x);
    for (int k = 0; k + 1 < spec.num_ticks_x; ++k)
      CHECK(tick_value(spec.x_axis, k + 1, true) /
                tick_value(spec.x_axis, k, true) ==
            doctest::Approx(spec.x_axis.stride));
  }
}

TEST_CASE("tick values form the progression the spec encodes") {
  const DomainProfile profile = DomainProfile::general();
  for (int i = 0; i < 30; ++i) {
    const ChartSpec spec = sample_spec(11, std::uint64_t(i), profile);
    for (int k = 0; k + 1 < spec.num_ticks_x; ++k) {
      const double gap =
          tick_value(spec.x_axis, k + 1) - tick_value(spec.x_axis, k);
      CHECK(gap == doctest::Approx(spec.x_axis.stride).epsilon(1e-9));
    }
    for (int k = 0; k + 1 < spec.num_ticks_y; ++k) {
      const double gap =
          tick_value(spec.y_axis, k + 1) - tick_value(spec.y_axis, k);
      CHECK(gap == doctest::Approx(spec.y_axis.stride).epsilon(1e-9));
    }
  }
}

TEST_CASE("format_tick_label pinned examples") {
  CHECK(format_tick_label(5000, LabelFormat::k_suffix) == "5k");
  CHECK(format_tick_label(0.5, LabelFormat::percent) == "50%");
  CHECK(format_tick_label(0.2, LabelFormat::plain) == "0.2");
  CHECK(format_tick_label(-0.2, LabelFormat::plain) == "-0.2");
  CHECK(format_tick_label(10000, LabelFormat::k_suffix) == "10k");
  CHECK(format_tick_label(0.05, LabelFormat::percent) == "5%");
  CHECK(format_tick_label(-0.2, LabelFormat::percent) == "-20%");
  CHECK(format_tick_label(0, LabelFormat::plain) == "0");
}

TEST_CASE("format_tick_label rejects inadmissible pairs") {
  CHECK_THROWS_AS(format_tick_label(1.5, LabelFormat::percent), Error);
  CHECK_THROWS_AS(format_tick_label(500, LabelFormat::k_suffix), Error);
  CHECK_THROWS_AS(format_tick_label(1500.5, LabelFormat::k_suffix), Error);
}

TEST_CASE("labels round-trip through parse_tick_text exactly") {
  // Every generator-producible (value, format) pair must re-parse to the
  // exact stored double.
  const DomainProfile profile = DomainProfile::general();
  for (int i = 0; i < 60; ++i) {
    const ChartSpec spec = sample_spec(23, std::uint64_t(i), profile);
    for (int k = 0; k < spec.num_ticks_x; ++k) {
      const double v = tick_value(spec.x_axis, k, spec.log_x);
      CHECK(parse_tick_text(format_tick_label(v, spec.x_axis.label_format)) == v);
    }
    for (int k = 0; k < spec.num_ticks_y; ++k) {
      const double v = tick_value(spec.y_axis, k);
      CHECK(parse_tick_text(format_tick_label(v, spec.y_axis.label_format)) == v);
    }
  }
}

TEST_CASE("render_chart produces 720x720 deterministic images") {
  const ChartSpec spec = sample_spec(7, 0, DomainProfile::general());
  auto [img_a, gt_a] = render_chart(spec);
  CHECK(img_a.width == 720);
  CHECK(img_a.height == 720);
  CHECK(gt_a.width == 720);

  auto [img_b, gt_b] = render_chart(spec);
  CHECK(img_a.pixels == img_b.pixels);  // byte-identical
  CHECK(gt_a.corners == gt_b.corners);
  CHECK(gt_a.labels.size() == gt_b.labels.size());
}

TEST_CASE("grid=false leaves no grid-colored pixels inside the axes") {
  ChartSpec spec = sample_spec(7, 3, DomainProfile::general());
  spec.grid = false;
  auto [img, gt] = render_chart(spec);
  const Rgb grid_gray{211, 211, 211};
  const int x0 = int(gt.corners[0].x) + 2, x1 = int(gt.corners[2].x) - 2;
  const int y0 = int(gt.corners[0].y) + 2, y1 = int(gt.corners[2].y) - 2;
  int grid_pixels = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (img.get(x, y) == grid_gray) ++grid_pixels;
  CHECK(grid_pixels == 0);
}

TEST_CASE("ground truth counts match the spec") {
  const ChartSpec spec = sample_spec(42, 5, DomainProfile::general());
  auto [img, gt] = render_chart(spec);
  (void)img;
  CHECK(gt.labels.size() == std::size_t(spec.num_ticks_x + spec.num_ticks_y));
  CHECK(gt.marks.size() == spec.series.size() * std::size_t(spec.num_ticks_x));
  CHECK(gt.raw_series.size() == spec.series.size());
  CHECK_FALSE(gt.applied_homography.has_value());
  for (const MarkAnnotation& mark : gt.marks) {
    CHECK(mark.series_id >= 0);
    CHECK(mark.series_id < int(spec.series.size()));
  }
}

TEST_CASE("painted mark centroids sit on the annotation box centers") {
  // Box-symmetric mark shapes: painted centroid within 1 px of the box
  // center. A flat series keeps the line's own pixels symmetric around
  // each mark.
  for (const MarkStyle style :
       {MarkStyle::circle, MarkStyle::square, MarkStyle::diamond,
        MarkStyle::plus, MarkStyle::cross, MarkStyle::star}) {
    ChartSpec spec = sample_spec(7, 1, DomainProfile::general());
    spec.series.resize(1);
    spec.series[0].mark_style = style;
    spec.series[0].line_style = LineStyle::solid;
    spec.series[0].color = {220, 30, 30};
    const double flat_y =
        tick_value(spec.y_axis, 0) +
        0.5 * (tick_value(spec.y_axis, spec.num_ticks_y - 1) -
               tick_value(spec.y_axis, 0));
    for (SeriesPoint& p : spec.series[0].points) p.y_value = flat_y;

    auto [img, gt] = render_chart(spec);
    for (const MarkAnnotation& mark : gt.marks) {
      double sum_x = 0, sum_y = 0;
      int count = 0;
      for (int y = int(mark.box.y0) - 1; y <= int(mark.box.y1) + 1; ++y)
        for (int x = int(mark.box.x0) - 1; x <= int(mark.box.x1) + 1; ++x) {
          const Rgb c = img.get(x, y);
          if (c[0] > 150 && c[1] < 120 && c[2] < 120) {
            sum_x += x;
            sum_y += y;
            ++count;
          }
        }
      REQUIRE(count > 0);
      const Point2 centroid{sum_x / count, sum_y / count};
      CHECK(distance(centroid, mark.box.center()) < 1.0);
    }
  }
}

TEST_CASE("annotation soundness: box centers recover data points") {
  // Mapping a mark box center through the identity homography and the true
  // axis models recovers its data point within 0.5% of each axis range.
  const DomainProfile profile = DomainProfile::general();
  for (int i = 0; i < 20; ++i) {
    const ChartSpec spec = sample_spec(99, std::uint64_t(i), profile);
    auto [img, gt] = render_chart(spec);
    (void)img;
    const TrueAxes axes = true_axes(spec);
    const Point2 tl = gt.corners[0], br = gt.corners[2];
    const double x_range = std::abs(axes.x_last - axes.x_first);
    const double y_range = std::abs(axes.y_last - axes.y_first);

    for (const MarkAnnotation& mark : gt.marks) {
      const Point2 c = mark.box.center();
      const double cx = (c.x - tl.x) / (br.x - tl.x);
      const double cy = (c.y - tl.y) / (br.y - tl.y);
      CHECK(std::abs(axes.y_value(cy) - mark.data_point.y) < 0.005 * y_range);
      if (!spec.log_x)
        CHECK(std::abs(axes.x_value(cx) - mark.data_point.x) < 0.005 * x_range);
    }
  }
}

TEST_CASE("label annotations carry re-parseable text and exact values") {
  const ChartSpec spec = sample_spec(3, 2, DomainProfile::general());
  auto [img, gt] = render_chart(spec);
  (void)img;
  int x_count = 0, y_count = 0;
  for (const LabelAnnotation& label : gt.labels) {
    CHECK(parse_tick_text(label.text) == label.value);
    CHECK(label.box.width() > 0);
    CHECK(label.box.height() > 0);
    (label.axis == AxisKind::x ? x_count : y_count) += 1;
  }
  CHECK(x_count == spec.num_ticks_x);
  CHECK(y_count == spec.num_ticks_y);
}
