#pragma once

#include <chartex/augment.hpp>
#include <chartex/calibrate.hpp>
#include <chartex/detect.hpp>
#include <chartex/metric.hpp>
#include <chartex/synthgen.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chartex {

/// Runs fn(0..n-1) on up to `jobs` worker threads. Exceptions escaping fn
/// are rethrown on the caller thread after all workers drain.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
  std::string out_dir;
  std::uint64_t seed = 1;
  int count = 10;
  std::string profile = "general";
  std::optional<AugmentConfig> augment;  // nullopt generates clean charts
  int jobs = 1;
};

struct GenResult {
  int written = 0;
  std::string manifest_path;
};

/// Writes img_NNNNNN.png + gt_NNNNNN.json per index and manifest.jsonl.
/// With augmentation the clean render is kept as img_NNNNNN_clean.png.
/// All randomness derives from (seed, index, stage), so re-runs are
/// byte-identical.
GenResult run_gen(const GenOptions& options);

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

enum class DetectorKind { oracle, noisy, import_json };

struct ExtractOptions {
  std::string dataset_dir;
  std::string out_dir;
  DetectorKind detector = DetectorKind::oracle;
  NoiseModel noise;  // noisy detector; per-image seed derived from `seed`
  CornerMode corner_mode = CornerMode::keypoint;
  ExtractParams params;
  std::uint64_t seed = 1;
  std::string import_dir;  // det_NNNNNN.json files for DetectorKind::import_json
  int jobs = 1;
};

struct ExtractResult {
  int succeeded = 0;
  int failed = 0;
};

/// Writes pred_NNNNNN.json (extraction or stage-tagged failure record) and
/// det_NNNNNN.json (the detections used, re-importable) per image. A
/// failing image never aborts the batch.
ExtractResult run_extract(const ExtractOptions& options);

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string dataset_dir;
  std::string pred_dir;
  Tolerance tolerance;
  std::vector<double> sweep;  // extra magnitudes for the tolerance sweep
  std::string report_path;    // optional JSONL per-image report
};

struct EvalResult {
  long long tp = 0;
  long long pred_points = 0;
  long long gt_points = 0;
  int images = 0;
  int failed_images = 0;
  double precision = 0;
  double recall = 0;
  double micro_f1 = 0;
  double macro_f1 = 0;
  std::vector<std::pair<double, double>> sweep;  // (magnitude, micro F1)
};

EvalResult run_eval(const EvalOptions& options);

// ---------------------------------------------------------------------------
// overlay
// ---------------------------------------------------------------------------

struct OverlayOptions {
  std::string dataset_dir;
  std::string pred_dir;
  std::string out_dir;
};

/// Draws detection boxes, recovered corners, the canonical grid, and the
/// extracted points reprojected into the image; failed extractions get a
/// red banner. Returns the number of overlays written.
int run_overlay(const OverlayOptions& options);

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

struct AblateOptions {
  std::string out_dir;
  std::uint64_t seed = 1;
  int count = 50;
  std::string profile = "general";
  std::vector<double> box_jitter_grid{0.0, 1.0, 2.0};
  CornerMode corner_mode = CornerMode::keypoint;
  int jobs = 1;
};

struct AblateRow {
  std::string transforms;
  double box_jitter_sigma = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Generates datasets along the transform ladder (baseline, +perspective,
/// +color, +blur/noise, +tps), extracts across the detector-noise grid,
/// and writes ablation.csv.
std::vector<AblateRow> run_ablate(const AblateOptions& options);

}  // namespace chartex
