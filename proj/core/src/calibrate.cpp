#include <chartex/calibrate.hpp>

#include <chartex/error.hpp>
#include <chartex/quadfit.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace chartex {

// ---------------------------------------------------------------------------
// Tick text parsing
// ---------------------------------------------------------------------------

double parse_tick_text(std::string_view text) {
  // Trim whitespace.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) raise(errc::unparseable_text, "empty label text");

  double factor = 1.0;
  if (text.back() == '%') {
    factor = 0.01;
    text.remove_suffix(1);
  } else if (text.back() == 'k' || text.back() == 'K') {
    factor = 1000.0;
    text.remove_suffix(1);
  }

  std::string digits;
  digits.reserve(text.size());
  for (char c : text)
    if (c != ',') digits.push_back(c);  // thousands separators
  if (!digits.empty() && digits.front() == '+') digits.erase(digits.begin());
  if (digits.empty())
    raise(errc::unparseable_text, "no numeric part in \"" + std::string(text) + "\"");

  double value = 0;
  const char* begin = digits.data();
  const char* end = begin + digits.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    raise(errc::unparseable_text, "cannot parse \"" + std::string(text) + "\"");
  return factor == 1.0 ? value : (factor == 0.01 ? value / 100.0 : value * 1000.0);
}

// ---------------------------------------------------------------------------
// Axis assignment
// ---------------------------------------------------------------------------

double AxisModel::value_at(double coord) const {
  const double t = a * coord + b;
  return log_scale ? std::pow(10.0, t) : t;
}

double AxisModel::coord_of(double value) const {
  const double t = log_scale ? std::log10(value) : value;
  return (t - b) / a;
}

std::pair<std::vector<ParsedLabel>, std::vector<ParsedLabel>> assign_axes(
    std::span<const Detection> detections, const Homography& to_canonical) {
  constexpr double kBand = 0.15;
  constexpr double kCoordLo = -0.3, kCoordHi = 1.3;
  std::vector<ParsedLabel> x_labels, y_labels;

  for (std::size_t id = 0; id < detections.size(); ++id) {
    const Detection& det = detections[id];
    if (det.cls != DetectionClass::tick_label || !det.text) continue;
    Point2 c;
    try {
      c = apply(to_canonical, det.box.center());
    } catch (const Error&) {
      continue;  // center maps to infinity: not a usable label
    }
    const bool x_cand =
        std::abs(c.y - 0) <= kBand || std::abs(c.y - 1) <= kBand;
    const bool y_cand =
        std::abs(c.x - 0) <= kBand || std::abs(c.x - 1) <= kBand;
    if (x_cand == y_cand) continue;  // ambiguous or interior

    const double coord = x_cand ? c.x : c.y;
    if (coord < kCoordLo || coord > kCoordHi) continue;

    double value = 0;
    try {
      value = parse_tick_text(*det.text);
    } catch (const Error&) {
      continue;  // unreadable text: outlier candidate, not a failure
    }
    if (!std::isfinite(value)) continue;

    (x_cand ? x_labels : y_labels)
        .push_back({coord, value, static_cast<int>(id)});
  }
  return {std::move(x_labels), std::move(y_labels)};
}

// ---------------------------------------------------------------------------
// Consensus axis fit
// ---------------------------------------------------------------------------

AxisModel fit_axis(std::span<const ParsedLabel> labels, bool log_scale) {
  struct Sample {
    double coord, t;
    int id;
  };
  std::vector<Sample> samples;
  for (const ParsedLabel& label : labels) {
    if (log_scale && !(label.value > 0)) continue;  // outliers on a log axis
    const double t = log_scale ? std::log10(label.value) : label.value;
    if (std::isfinite(t)) samples.push_back({label.canonical_coord, t, label.detection_id});
  }
  if (samples.size() < 2)
    raise(errc::insufficient_labels,
          "need >= 2 usable labels, have " + std::to_string(samples.size()));

  // Median coordinate gap; label positions are trustworthy even when the
  // parsed values are not, so the inlier band scales with the model's own
  // per-tick value increment.
  std::vector<double> coords;
  for (const Sample& s : samples) coords.push_back(s.coord);
  std::sort(coords.begin(), coords.end());
  std::vector<double> gaps;
  for (std::size_t i = 0; i + 1 < coords.size(); ++i)
    if (coords[i + 1] - coords[i] > 1e-9) gaps.push_back(coords[i + 1] - coords[i]);
  if (gaps.empty())
    raise(errc::insufficient_labels, "labels share one canonical coordinate");
  std::sort(gaps.begin(), gaps.end());
  const double median_gap = gaps[gaps.size() / 2];

  int best_count = -1;
  double best_resid = 0;
  double best_a = 0, best_b = 0;
  std::vector<int> best_inliers;

  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double dc = samples[j].coord - samples[i].coord;
      if (std::abs(dc) <= 1e-9) continue;
      const double a = (samples[j].t - samples[i].t) / dc;
      const double b = samples[i].t - a * samples[i].coord;
      const double threshold =
          0.2 * std::abs(a) * median_gap + 1e-12 * (1 + std::abs(b));
      int count = 0;
      double resid = 0;
      std::vector<int> inliers;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const double r = std::abs(a * samples[k].coord + b - samples[k].t);
        if (r <= threshold) {
          ++count;
          resid += r;
          inliers.push_back(static_cast<int>(k));
        }
      }
      if (count > best_count || (count == best_count && resid < best_resid)) {
        best_count = count;
        best_resid = resid;
        best_a = a;
        best_b = b;
        best_inliers = std::move(inliers);
      }
    }

  if (best_count < 2) raise(errc::no_consensus, "no pair model reached 2 inliers");

  // Least-squares refit on the consensus set.
  double sc = 0, st = 0, scc = 0, sct = 0;
  const double n = double(best_inliers.size());
  for (int k : best_inliers) {
    const Sample& s = samples[std::size_t(k)];
    sc += s.coord;
    st += s.t;
    scc += s.coord * s.coord;
    sct += s.coord * s.t;
  }
  const double denom = n * scc - sc * sc;
  AxisModel model;
  model.log_scale = log_scale;
  if (std::abs(denom) > 1e-12) {
    model.a = (n * sct - sc * st) / denom;
    model.b = (st - model.a * sc) / n;
  } else {
    model.a = best_a;
    model.b = best_b;
  }
  if (!(std::abs(model.a) > 1e-12))
    raise(errc::no_consensus, "axis model has no scale");
  for (int k : best_inliers)
    model.inlier_ids.push_back(samples[std::size_t(k)].id);
  return model;
}

// ---------------------------------------------------------------------------
// Series extraction
// ---------------------------------------------------------------------------

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    e.tag_stage(name);
    throw;
  }
}

}  // namespace

SeriesExtraction extract_series(const DetectionSet& detections,
                                const ExtractParams& params) {
  SeriesExtraction out;

  out.corners = stage("corners", [&] {
    if (detections.corners.keypoints) return *detections.corners.keypoints;
    if (detections.corners.mask) return mask_to_quad(*detections.corners.mask);
    raise(errc::invalid_argument, "detection set has no corner evidence");
  });
  const Homography to_canonical =
      stage("corners", [&] { return canonicalize(out.corners); });

  auto [x_labels, y_labels] = stage(
      "axes", [&] { return assign_axes(detections.detections, to_canonical); });
  out.x_axis = stage("fit_x", [&] { return fit_axis(x_labels, params.log_x); });
  out.y_axis = stage("fit_y", [&] { return fit_axis(y_labels, false); });

  // Collect marks and resolve line membership.
  std::vector<std::size_t> mark_ids;
  for (std::size_t i = 0; i < detections.detections.size(); ++i)
    if (detections.detections[i].cls == DetectionClass::mark)
      mark_ids.push_back(i);

  std::vector<std::vector<int>> groups;           // local mark indices
  std::vector<double> group_confidence;
  stage("grouping", [&] {
    bool all_series = true, all_embedding = true;
    for (std::size_t i : mark_ids) {
      all_series = all_series && detections.detections[i].series_id.has_value();
      all_embedding = all_embedding && detections.detections[i].embedding.has_value();
    }
    GroupingMode mode = params.grouping_mode;
    if (mode == GroupingMode::automatic)
      mode = all_series ? GroupingMode::classify : GroupingMode::cluster;

    if (mode == GroupingMode::classify) {
      if (!all_series)
        raise(errc::invalid_argument, "classification grouping needs series ids");
      std::map<int, std::vector<int>> by_series;
      for (std::size_t k = 0; k < mark_ids.size(); ++k)
        by_series[*detections.detections[mark_ids[k]].series_id].push_back(
            static_cast<int>(k));
      for (auto& [sid, members] : by_series) {
        groups.push_back(std::move(members));
        group_confidence.push_back(1.0);
      }
    } else {
      if (!all_embedding)
        raise(errc::invalid_argument, "clustering needs mark embeddings");
      std::vector<Embedding> embeddings;
      for (std::size_t i : mark_ids)
        embeddings.push_back(*detections.detections[i].embedding);
      groups = cluster_marks(embeddings, params.grouping, params.cluster_threshold);
      std::sort(groups.begin(), groups.end(),
                [](const auto& a, const auto& b) { return a.front() < b.front(); });
      const SimilarityMatrix logits = similarity_logits(embeddings, params.grouping);
      for (const auto& g : groups) {
        double acc = 0;
        int pairs = 0;
        for (std::size_t a = 0; a < g.size(); ++a)
          for (std::size_t b = a + 1; b < g.size(); ++b) {
            acc += pair_probability(logits.at(g[a], g[b]));
            ++pairs;
          }
        group_confidence.push_back(pairs > 0 ? acc / pairs : 1.0);
      }
    }
    return 0;
  });

  stage("series", [&] {
    for (const auto& group : groups) {
      std::vector<Point2> line;
      for (int k : group) {
        const Detection& det = detections.detections[mark_ids[std::size_t(k)]];
        const Point2 c = apply(to_canonical, det.box.center());
        line.push_back({out.x_axis.value_at(c.x), out.y_axis.value_at(c.y)});
      }
      std::stable_sort(line.begin(), line.end(),
                       [](Point2 a, Point2 b) { return a.x < b.x; });
      out.lines.push_back(std::move(line));
    }
    return 0;
  });
  out.line_confidence = std::move(group_confidence);

  const double fx = x_labels.empty()
                        ? 0.0
                        : double(out.x_axis.inlier_ids.size()) / double(x_labels.size());
  const double fy = y_labels.empty()
                        ? 0.0
                        : double(out.y_axis.inlier_ids.size()) / double(y_labels.size());
  out.confidence = fx * fy;
  return out;
}

}  // namespace chartex
