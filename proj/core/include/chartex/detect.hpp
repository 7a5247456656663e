#pragma once

#include <chartex/geometry.hpp>
#include <chartex/grouping.hpp>
#include <chartex/image.hpp>
#include <chartex/synthgen.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chartex {

enum class DetectionClass { tick_label, mark };
enum class CornerMode { keypoint, mask };

struct Detection {
  DetectionClass cls = DetectionClass::tick_label;
  Rect box;
  double score = 1.0;
  std::optional<std::string> text;       // labels only
  std::optional<Embedding> embedding;    // marks only
  std::optional<int> series_id;          // marks only (classification path)
};

struct CornerEvidence {
  std::optional<Quad> keypoints;
  std::optional<BinaryMask> mask;
};

struct DetectionSet {
  std::vector<Detection> detections;
  CornerEvidence corners;
};

/// Emulated detector error. All probabilities in [0, 1], sigmas in pixels
/// (embedding sigma in embedding units).
struct NoiseModel {
  double box_jitter_sigma = 0.0;
  double drop_prob = 0.0;
  double spurious_prob = 0.0;
  double ocr_char_sub_prob = 0.0;
  double corner_jitter_sigma = 0.0;
  double embedding_noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Embedding dimension of the oracle's per-series orthonormal family.
inline constexpr int kOracleEmbeddingDim = 8;

/// Perfect detections straight from ground truth: exact boxes, texts and
/// series ids, unit basis embeddings per series, corners as keypoints or a
/// filled-quad mask.
DetectionSet oracle_detect(const GroundTruth& gt, CornerMode mode);

/// Oracle output degraded per the noise model; deterministic per seed.
DetectionSet noisy_detect(const GroundTruth& gt, const NoiseModel& noise,
                          CornerMode mode);

}  // namespace chartex
