#pragma once

#include <chartex/augment.hpp>
#include <chartex/calibrate.hpp>
#include <chartex/detect.hpp>
#include <chartex/synthgen.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chartex {

// JSON wire formats. Schemas are documented in the README; all of them are
// stable interfaces so externally produced detections can be imported.

std::string to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(std::string_view json);

std::string to_json(const DetectionSet& detections);
DetectionSet detection_set_from_json(std::string_view json);

std::string to_json(const SeriesExtraction& extraction);
SeriesExtraction series_extraction_from_json(std::string_view json);

/// Failed extractions are recorded per image instead of aborting a batch.
struct ExtractionFailure {
  std::string stage;
  std::string code;
  std::string message;
};
std::string to_json(const ExtractionFailure& failure);
/// Empty optional when the document is a successful extraction.
std::optional<ExtractionFailure> failure_from_json(std::string_view json);

std::string to_json(const AugmentConfig& config);
AugmentConfig augment_config_from_json(std::string_view json);

std::string to_json(const NoiseModel& noise);
NoiseModel noise_model_from_json(std::string_view json);

struct ManifestEntry {
  int index = 0;
  std::string image;
  std::string gt;
  std::string clean_image;  // empty when generation had no augmentation
};
std::string to_json_line(const ManifestEntry& entry);
std::vector<ManifestEntry> manifest_from_jsonl(std::string_view jsonl);

/// Row-major run-length encoding, starting with the number of leading
/// zeros and alternating zero/one runs.
std::vector<std::int64_t> rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(int width, int height, std::span<const std::int64_t> runs);

std::string read_text_file(const std::string& path);
/// Writes via a temp file + rename so batch outputs appear atomically.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace chartex
