#include <chartex/detect.hpp>

#include <chartex/draw.hpp>
#include <chartex/error.hpp>
#include <chartex/rng.hpp>

#include <algorithm>
#include <cmath>
#include <string_view>

namespace chartex {

namespace {

constexpr std::string_view kAlphabet = "0123456789.-%k,";

Embedding series_embedding(int series_id) {
  Embedding e(kOracleEmbeddingDim, 0.0);
  e[std::size_t(series_id % kOracleEmbeddingDim)] = 1.0;
  return e;
}

BinaryMask rasterize_corner_mask(const Quad& corners, int width, int height) {
  BinaryMask mask(width, height);
  fill_polygon(mask, corners);
  return mask;
}

}  // namespace

DetectionSet oracle_detect(const GroundTruth& gt, CornerMode mode) {
  DetectionSet out;
  for (const LabelAnnotation& label : gt.labels) {
    Detection d;
    d.cls = DetectionClass::tick_label;
    d.box = label.box;
    d.text = label.text;
    out.detections.push_back(std::move(d));
  }
  for (const MarkAnnotation& mark : gt.marks) {
    Detection d;
    d.cls = DetectionClass::mark;
    d.box = mark.box;
    d.series_id = mark.series_id;
    d.embedding = series_embedding(mark.series_id);
    out.detections.push_back(std::move(d));
  }
  if (mode == CornerMode::keypoint)
    out.corners.keypoints = gt.corners;
  else
    out.corners.mask = rasterize_corner_mask(gt.corners, gt.width, gt.height);
  return out;
}

DetectionSet noisy_detect(const GroundTruth& gt, const NoiseModel& noise,
                          CornerMode mode) {
  DetectionSet oracle = oracle_detect(gt, CornerMode::keypoint);
  Rng rng(noise.seed);
  DetectionSet out;

  for (Detection& d : oracle.detections) {
    if (rng.bernoulli(noise.drop_prob)) continue;

    const double jx = rng.normal(0, noise.box_jitter_sigma);
    const double jy = rng.normal(0, noise.box_jitter_sigma);
    d.box = {d.box.x0 + jx, d.box.y0 + jy, d.box.x1 + jx, d.box.y1 + jy};

    if (d.text) {
      std::string& text = *d.text;
      for (char& c : text)
        if (rng.bernoulli(noise.ocr_char_sub_prob)) {
          // Substitute with a different character so every event is visible.
          char repl = c;
          while (repl == c)
            repl = kAlphabet[std::size_t(
                rng.uniform_int(0, std::ssize(kAlphabet) - 1))];
          c = repl;
        }
    }
    if (d.embedding && noise.embedding_noise_sigma > 0) {
      Embedding& e = *d.embedding;
      double norm2 = 0;
      for (double& v : e) {
        v += rng.normal(0, noise.embedding_noise_sigma);
        norm2 += v * v;
      }
      const double n = std::sqrt(norm2);
      if (n > 1e-12)
        for (double& v : e) v /= n;
      else
        e = series_embedding(d.series_id.value_or(0));
    }
    out.detections.push_back(std::move(d));
  }

  // Spurious detections, uniform in frame, with plausible label texts.
  const std::size_t original = out.detections.size();
  for (std::size_t i = 0; i < original; ++i) {
    if (!rng.bernoulli(noise.spurious_prob)) continue;
    const Detection& src = out.detections[i];
    Detection d;
    d.cls = src.cls;
    const double w = src.box.width(), h = src.box.height();
    const double cx = rng.uniform(0, gt.width - 1);
    const double cy = rng.uniform(0, gt.height - 1);
    d.box = {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
    d.score = 0.5;
    if (d.cls == DetectionClass::tick_label) {
      const double value = std::round(rng.uniform(-100, 100));
      d.text = format_tick_label(value, LabelFormat::plain);
    } else {
      d.series_id = static_cast<int>(rng.uniform_int(0, 2));
      Embedding e(kOracleEmbeddingDim);
      double norm2 = 0;
      for (double& v : e) {
        v = rng.normal(0, 1);
        norm2 += v * v;
      }
      for (double& v : e) v /= std::max(std::sqrt(norm2), 1e-12);
      d.embedding = std::move(e);
    }
    out.detections.push_back(std::move(d));
  }

  Quad corners = gt.corners;
  for (Point2& c : corners) {
    c.x += rng.normal(0, noise.corner_jitter_sigma);
    c.y += rng.normal(0, noise.corner_jitter_sigma);
  }
  if (mode == CornerMode::keypoint)
    out.corners.keypoints = corners;
  else
    out.corners.mask = rasterize_corner_mask(corners, gt.width, gt.height);
  return out;
}

}  // namespace chartex
