#include <chartex/synthgen.hpp>

#include <chartex/draw.hpp>
#include <chartex/error.hpp>
#include <chartex/font.hpp>
#include <chartex/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace chartex {

namespace {

double pow10i(int d) {
  double p = 1;
  for (int i = 0; i < d; ++i) p *= 10;
  return p;
}

std::string shortest_fixed(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

// Multiplies a fixed-notation decimal string by 100 exactly.
std::string shift_point_right2(const std::string& s) {
  std::string sign;
  std::string digits = s;
  if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
    if (digits[0] == '-') sign = "-";
    digits.erase(digits.begin());
  }
  std::string int_part = digits, frac_part;
  if (const auto dot = digits.find('.'); dot != std::string::npos) {
    int_part = digits.substr(0, dot);
    frac_part = digits.substr(dot + 1);
  }
  while (frac_part.size() < 2) frac_part.push_back('0');
  int_part += frac_part.substr(0, 2);
  frac_part.erase(0, 2);
  while (int_part.size() > 1 && int_part[0] == '0') int_part.erase(int_part.begin());
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  std::string out = sign + int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  return out;
}

}  // namespace

double tick_value(const AxisSpec& axis, int index, bool log_scale) {
  if (log_scale) {
    double v = axis.start;
    for (int i = 0; i < index; ++i) v *= axis.stride;
    return v;
  }
  const double scale = pow10i(axis.decimals);
  const long long n0 = std::llround(axis.start * scale);
  const long long ns = std::llround(axis.stride * scale);
  return static_cast<double>(n0 + static_cast<long long>(index) * ns) / scale;
}

std::string format_tick_label(double value, LabelFormat format) {
  switch (format) {
    case LabelFormat::plain:
      return shortest_fixed(value);
    case LabelFormat::percent: {
      if (!(std::abs(value) < 1.0))
        raise(errc::inadmissible_format,
              "percent format needs |value| < 1, got " + shortest_fixed(value));
      return shift_point_right2(shortest_fixed(value)) + "%";
    }
    case LabelFormat::k_suffix: {
      const double q = value / 1000.0;
      if (!(value >= 1000.0) || q != std::floor(q))
        raise(errc::inadmissible_format,
              "k format needs a multiple of 1000 >= 1000, got " +
                  shortest_fixed(value));
      return shortest_fixed(q) + "k";
    }
  }
  raise(errc::invalid_argument, "unknown label format");
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

DomainProfile DomainProfile::general() {
  DomainProfile p;
  p.name = "general";
  const std::vector<AxisOptions> catalog = {
      {0.0, 1.0, {{0.1, 1}}},
      {0.0, 10.0, {{0.5, 1}, {1, 0}}},
      {0.0, 100.0, {{2, 0}, {5, 0}, {10, 0}}},
      {1000.0, 10000.0, {{1000, 0}}},
      {-50.0, 50.0, {{5, 0}, {10, 0}}},
  };
  p.x_options = catalog;
  p.y_options = catalog;
  p.mark_styles = {MarkStyle::circle, MarkStyle::triangle, MarkStyle::cross,
                   MarkStyle::diamond, MarkStyle::square, MarkStyle::plus,
                   MarkStyle::star};
  p.line_styles = {LineStyle::solid, LineStyle::dot, LineStyle::dash,
                   LineStyle::dash_dot};
  return p;
}

DomainProfile DomainProfile::audiogram_like() {
  DomainProfile p;
  p.name = "audiogram";
  p.log_x = true;
  p.x_options = {{125.0, 16000.0, {{2, 0}}}};  // stride is the tick ratio
  p.y_options = {{-10.0, 120.0, {{10, 0}}}};
  p.min_ticks = 5;
  p.max_ticks = 10;
  p.mark_styles = {MarkStyle::circle, MarkStyle::cross};
  p.line_styles = {LineStyle::solid};
  return p;
}

DomainProfile DomainProfile::by_name(std::string_view name) {
  if (name == "general") return general();
  if (name == "audiogram") return audiogram_like();
  raise(errc::invalid_argument, "unknown profile: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Spec sampling
// ---------------------------------------------------------------------------

namespace {

Rgb hsv_to_rgb(double h_deg, double s, double v) {
  const double h = std::fmod(std::fmod(h_deg, 360.0) + 360.0, 360.0) / 60.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s);
  const double q = v * (1 - s * f);
  const double t = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  auto to8 = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255));
  };
  return {to8(r), to8(g), to8(b)};
}

bool percent_admissible(const AxisSpec& axis, int ticks, bool log_scale) {
  for (int i = 0; i < ticks; ++i)
    if (!(std::abs(tick_value(axis, i, log_scale)) < 1.0)) return false;
  return true;
}

bool k_admissible(const AxisSpec& axis, int ticks, bool log_scale) {
  for (int i = 0; i < ticks; ++i) {
    const double v = tick_value(axis, i, log_scale);
    if (!(v >= 1000.0) || v / 1000.0 != std::floor(v / 1000.0)) return false;
  }
  return true;
}

}  // namespace

ChartSpec sample_spec(std::uint64_t master_seed, std::uint64_t index,
                      const DomainProfile& profile) {
  Rng rng(derive_seed(master_seed, index, "spec"));
  ChartSpec spec;
  spec.seed = derive_seed(master_seed, index, "spec");
  spec.log_x = profile.log_x;
  spec.aspect_ratio = rng.uniform(0.25, 1.0);

  // x axis
  {
    const auto& opt = profile.x_options[static_cast<std::size_t>(
        rng.uniform_int(0, std::ssize(profile.x_options) - 1))];
    if (profile.log_x) {
      const auto& sopt = opt.strides[static_cast<std::size_t>(
          rng.uniform_int(0, std::ssize(opt.strides) - 1))];
      const double ratio = sopt.stride;
      const int fit =
          1 + static_cast<int>(std::floor(std::log(opt.hi / opt.lo) /
                                              std::log(ratio) +
                                          1e-9));
      spec.num_ticks_x = static_cast<int>(
          rng.uniform_int(profile.min_ticks, std::min(profile.max_ticks, fit)));
      spec.x_axis = {opt.lo, ratio, 0, LabelFormat::plain};
    } else {
      spec.num_ticks_x =
          static_cast<int>(rng.uniform_int(profile.min_ticks, profile.max_ticks));
      std::vector<StrideOption> fit;
      for (const auto& s : opt.strides)
        if ((spec.num_ticks_x - 1) * s.stride <= (opt.hi - opt.lo) * (1 + 1e-12))
          fit.push_back(s);
      const auto& sopt =
          fit[static_cast<std::size_t>(rng.uniform_int(0, std::ssize(fit) - 1))];
      spec.x_axis = {opt.lo, sopt.stride, sopt.decimals, LabelFormat::plain};
    }
    if (percent_admissible(spec.x_axis, spec.num_ticks_x, spec.log_x) &&
        rng.bernoulli(0.5))
      spec.x_axis.label_format = LabelFormat::percent;
    else if (k_admissible(spec.x_axis, spec.num_ticks_x, spec.log_x) &&
             rng.bernoulli(0.5))
      spec.x_axis.label_format = LabelFormat::k_suffix;
  }

  // y axis (always linear)
  {
    const auto& opt = profile.y_options[static_cast<std::size_t>(
        rng.uniform_int(0, std::ssize(profile.y_options) - 1))];
    spec.num_ticks_y =
        static_cast<int>(rng.uniform_int(profile.min_ticks, profile.max_ticks));
    std::vector<StrideOption> fit;
    for (const auto& s : opt.strides)
      if ((spec.num_ticks_y - 1) * s.stride <= (opt.hi - opt.lo) * (1 + 1e-12))
        fit.push_back(s);
    const auto& sopt =
        fit[static_cast<std::size_t>(rng.uniform_int(0, std::ssize(fit) - 1))];
    spec.y_axis = {opt.lo, sopt.stride, sopt.decimals, LabelFormat::plain};
    if (percent_admissible(spec.y_axis, spec.num_ticks_y, false) &&
        rng.bernoulli(0.5))
      spec.y_axis.label_format = LabelFormat::percent;
    else if (k_admissible(spec.y_axis, spec.num_ticks_y, false) &&
             rng.bernoulli(0.5))
      spec.y_axis.label_format = LabelFormat::k_suffix;
  }

  spec.grid = rng.bernoulli(0.5);

  const int n_series =
      static_cast<int>(rng.uniform_int(profile.min_series, profile.max_series));
  std::vector<MarkStyle> marks = profile.mark_styles;
  for (int i = 0; i < n_series && i < std::ssize(marks) - 1; ++i) {
    const auto j = rng.uniform_int(i, std::ssize(marks) - 1);
    std::swap(marks[static_cast<std::size_t>(i)], marks[static_cast<std::size_t>(j)]);
  }

  const double y_lo = tick_value(spec.y_axis, 0);
  const double y_hi = tick_value(spec.y_axis, spec.num_ticks_y - 1);
  const double range = y_hi - y_lo;
  const double walk_lo = y_lo + 0.03 * range;
  const double walk_hi = y_hi - 0.03 * range;
  const double hue_base = rng.uniform(0, 360);

  for (int s = 0; s < n_series; ++s) {
    SeriesSpec series;
    series.mark_style = marks[static_cast<std::size_t>(s % std::ssize(marks))];
    series.line_style = profile.line_styles[static_cast<std::size_t>(
        rng.uniform_int(0, std::ssize(profile.line_styles) - 1))];
    const double hue = hue_base + s * 360.0 / n_series + rng.uniform(-18, 18);
    series.color = hsv_to_rgb(hue, rng.uniform(0.55, 0.95), rng.uniform(0.35, 0.7));

    const double sigma = range * rng.uniform(0.08, 0.25);
    double y = rng.uniform(walk_lo, walk_hi);
    for (int i = 0; i < spec.num_ticks_x; ++i) {
      series.points.push_back({i, y});
      y = std::clamp(y + rng.normal(0, sigma), walk_lo, walk_hi);
    }
    spec.series.push_back(std::move(series));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

constexpr double kMarkRadius = 6.0;
constexpr double kSeriesWidth = 2.2;
constexpr double kMarkStroke = 2.6;
constexpr double kAxesWidth = 2.0;
constexpr double kTickLen = 6.0;
constexpr double kLabelSize = 13.0;
constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrid{211, 211, 211};

struct Layout {
  double left, right, top, bottom;
  int nx, ny;

  double tick_x(int i) const {
    return left + (right - left) * i / double(nx - 1);
  }
  double tick_y(int j) const {
    return bottom - (bottom - top) * j / double(ny - 1);
  }
  double y_of_value(double v, double v_lo, double v_hi) const {
    return bottom - (bottom - top) * (v - v_lo) / (v_hi - v_lo);
  }
};

Layout make_layout(const ChartSpec& spec) {
  Layout l;
  l.left = 96;
  l.right = spec.width - 40.0;
  const double plot_w = l.right - l.left;
  const double plot_h =
      std::round(std::clamp(plot_w * spec.aspect_ratio, 140.0, plot_w));
  const double avail_top = 40, avail_bottom = spec.height - 80.0;
  l.top = std::floor(avail_top + (avail_bottom - avail_top - plot_h) / 2);
  l.bottom = l.top + plot_h;
  l.nx = spec.num_ticks_x;
  l.ny = spec.num_ticks_y;
  return l;
}

StrokePattern pattern_for(LineStyle style) {
  switch (style) {
    case LineStyle::solid: return StrokePattern::solid();
    case LineStyle::dot: return {{1.0, 4.5}};
    case LineStyle::dash: return {{8.0, 5.0}};
    case LineStyle::dash_dot: return {{9.0, 4.0, 1.2, 4.0}};
  }
  return StrokePattern::solid();
}

// Per-axis half extents of the painted mark, brush included; the annotation
// box is center +- extent so its center always coincides with the data point.
Point2 mark_extent(MarkStyle style, double r) {
  switch (style) {
    case MarkStyle::circle: return {r, r};
    case MarkStyle::square: return {0.78 * r, 0.78 * r};
    case MarkStyle::diamond: return {r, r};
    case MarkStyle::triangle: return {0.866 * r, 0.75 * r};
    case MarkStyle::plus: return {r + kMarkStroke / 2, r + kMarkStroke / 2};
    case MarkStyle::cross:
      return {0.75 * r + kMarkStroke / 2, 0.75 * r + kMarkStroke / 2};
    case MarkStyle::star: return {0.951 * r, 0.905 * r};
  }
  return {r, r};
}

void draw_mark(RasterImage& img, MarkStyle style, Point2 c, double r, Rgb color) {
  switch (style) {
    case MarkStyle::circle:
      fill_circle(img, c, r, color);
      break;
    case MarkStyle::square: {
      const double a = 0.78 * r;
      const Point2 q[4] = {{c.x - a, c.y - a}, {c.x + a, c.y - a},
                           {c.x + a, c.y + a}, {c.x - a, c.y + a}};
      fill_polygon(img, q, color);
      break;
    }
    case MarkStyle::diamond: {
      const Point2 q[4] = {{c.x, c.y - r}, {c.x + r, c.y},
                           {c.x, c.y + r}, {c.x - r, c.y}};
      fill_polygon(img, q, color);
      break;
    }
    case MarkStyle::triangle: {
      // Vertically re-centered so the bounding box centers on the point.
      const double s = 0.25 * r;
      const Point2 q[3] = {{c.x, c.y - r + s},
                           {c.x + 0.866 * r, c.y + 0.5 * r + s},
                           {c.x - 0.866 * r, c.y + 0.5 * r + s}};
      fill_polygon(img, q, color);
      break;
    }
    case MarkStyle::plus:
      draw_segment(img, {c.x - r, c.y}, {c.x + r, c.y}, kMarkStroke, color);
      draw_segment(img, {c.x, c.y - r}, {c.x, c.y + r}, kMarkStroke, color);
      break;
    case MarkStyle::cross: {
      const double d = 0.75 * r;
      draw_segment(img, {c.x - d, c.y - d}, {c.x + d, c.y + d}, kMarkStroke, color);
      draw_segment(img, {c.x - d, c.y + d}, {c.x + d, c.y - d}, kMarkStroke, color);
      break;
    }
    case MarkStyle::star: {
      const double inner = 0.45 * r;
      const double shift = 0.0955 * r;
      Point2 q[10];
      for (int k = 0; k < 5; ++k) {
        const double ao = (-90 + 72 * k) * std::numbers::pi / 180;
        const double ai = (-54 + 72 * k) * std::numbers::pi / 180;
        q[2 * k] = {c.x + r * std::cos(ao), c.y + shift + r * std::sin(ao)};
        q[2 * k + 1] = {c.x + inner * std::cos(ai),
                        c.y + shift + inner * std::sin(ai)};
      }
      fill_polygon(img, q, color);
      break;
    }
  }
}

}  // namespace

std::pair<RasterImage, GroundTruth> render_chart(const ChartSpec& spec) {
  RasterImage img(spec.width, spec.height);
  GroundTruth gt;
  gt.width = spec.width;
  gt.height = spec.height;

  const Layout l = make_layout(spec);
  gt.corners = {{{l.left, l.top},
                 {l.left, l.bottom},
                 {l.right, l.bottom},
                 {l.right, l.top}}};

  if (spec.grid) {
    for (int i = 0; i < l.nx; ++i)
      draw_segment(img, {l.tick_x(i), l.top}, {l.tick_x(i), l.bottom}, 1.0, kGrid);
    for (int j = 0; j < l.ny; ++j)
      draw_segment(img, {l.left, l.tick_y(j)}, {l.right, l.tick_y(j)}, 1.0, kGrid);
  }

  // Axes rectangle and tick marks.
  const Quad ax = gt.corners;
  for (int i = 0; i < 4; ++i)
    draw_segment(img, ax[i], ax[(i + 1) % 4], kAxesWidth, kBlack);
  for (int i = 0; i < l.nx; ++i)
    draw_segment(img, {l.tick_x(i), l.bottom}, {l.tick_x(i), l.bottom + kTickLen},
                 kAxesWidth, kBlack);
  for (int j = 0; j < l.ny; ++j)
    draw_segment(img, {l.left - kTickLen, l.tick_y(j)}, {l.left, l.tick_y(j)},
                 kAxesWidth, kBlack);

  // Tick labels.
  for (int i = 0; i < l.nx; ++i) {
    const double v = tick_value(spec.x_axis, i, spec.log_x);
    const std::string text = format_tick_label(v, spec.x_axis.label_format);
    const Point2 anchor{l.tick_x(i) - text_width(text, kLabelSize) / 2,
                        l.bottom + 11};
    const PaintBounds b = draw_text(img, text, anchor, kLabelSize, kBlack);
    gt.labels.push_back({b.rect(), text, v, AxisKind::x});
  }
  for (int j = 0; j < l.ny; ++j) {
    const double v = tick_value(spec.y_axis, j);
    const std::string text = format_tick_label(v, spec.y_axis.label_format);
    const Point2 anchor{l.left - 11 - text_width(text, kLabelSize),
                        l.tick_y(j) - kLabelSize / 2};
    const PaintBounds b = draw_text(img, text, anchor, kLabelSize, kBlack);
    gt.labels.push_back({b.rect(), text, v, AxisKind::y});
  }

  // Series.
  const double y_lo = tick_value(spec.y_axis, 0);
  const double y_hi = tick_value(spec.y_axis, spec.num_ticks_y - 1);
  for (int s = 0; s < std::ssize(spec.series); ++s) {
    const SeriesSpec& series = spec.series[static_cast<std::size_t>(s)];
    std::vector<Point2> px;
    std::vector<Point2> data;
    for (const SeriesPoint& p : series.points) {
      px.push_back({l.tick_x(p.tick_index),
                    l.y_of_value(p.y_value, y_lo, y_hi)});
      data.push_back({tick_value(spec.x_axis, p.tick_index, spec.log_x),
                      p.y_value});
    }
    draw_polyline(img, px, kSeriesWidth, series.color,
                  pattern_for(series.line_style));
    for (std::size_t i = 0; i < px.size(); ++i) {
      draw_mark(img, series.mark_style, px[i], kMarkRadius, series.color);
      const Point2 ext = mark_extent(series.mark_style, kMarkRadius);
      gt.marks.push_back({{px[i].x - ext.x, px[i].y - ext.y,
                           px[i].x + ext.x, px[i].y + ext.y},
                          s,
                          data[i]});
    }
    gt.raw_series.push_back(std::move(data));
  }

  return {std::move(img), std::move(gt)};
}

}  // namespace chartex
