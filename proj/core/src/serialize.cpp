#include <chartex/serialize.hpp>

#include <chartex/error.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace chartex {

using json = nlohmann::json;

namespace {

json point_to_json(Point2 p) { return json::array({p.x, p.y}); }
Point2 point_from_json(const json& j) { return {j.at(0), j.at(1)}; }

json rect_to_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }
Rect rect_from_json(const json& j) { return {j.at(0), j.at(1), j.at(2), j.at(3)}; }

json quad_to_json(const Quad& q) {
  json out = json::array();
  for (const Point2& p : q) out.push_back(point_to_json(p));
  return out;
}
Quad quad_from_json(const json& j) {
  Quad q;
  for (int i = 0; i < 4; ++i) q[std::size_t(i)] = point_from_json(j.at(i));
  return q;
}

json homography_to_json(const Homography& h) {
  json out = json::array();
  for (int r = 0; r < 3; ++r)
    out.push_back(json::array({h.at(r, 0), h.at(r, 1), h.at(r, 2)}));
  return out;
}
Homography homography_from_json(const json& j) {
  Homography h;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) h.m[std::size_t(r * 3 + c)] = j.at(r).at(c);
  return h;
}

json parse_json(std::string_view text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    raise(errc::io_error, std::string("malformed JSON for ") + what);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// GroundTruth
// ---------------------------------------------------------------------------

std::string to_json(const GroundTruth& gt) {
  json j;
  j["width"] = gt.width;
  j["height"] = gt.height;
  j["raw_series"] = json::array();
  for (const auto& line : gt.raw_series) {
    json pts = json::array();
    for (const Point2& p : line) pts.push_back(point_to_json(p));
    j["raw_series"].push_back(std::move(pts));
  }
  j["labels"] = json::array();
  for (const LabelAnnotation& label : gt.labels)
    j["labels"].push_back({{"box", rect_to_json(label.box)},
                           {"text", label.text},
                           {"value", label.value},
                           {"axis", label.axis == AxisKind::x ? "x" : "y"}});
  j["marks"] = json::array();
  for (const MarkAnnotation& mark : gt.marks)
    j["marks"].push_back({{"box", rect_to_json(mark.box)},
                          {"series_id", mark.series_id},
                          {"data_point", point_to_json(mark.data_point)}});
  j["corners"] = quad_to_json(gt.corners);
  j["applied_homography"] =
      gt.applied_homography ? homography_to_json(*gt.applied_homography)
                            : json(nullptr);
  return j.dump();
}

GroundTruth ground_truth_from_json(std::string_view text) {
  const json j = parse_json(text, "ground truth");
  GroundTruth gt;
  gt.width = j.at("width");
  gt.height = j.at("height");
  for (const json& line : j.at("raw_series")) {
    std::vector<Point2> pts;
    for (const json& p : line) pts.push_back(point_from_json(p));
    gt.raw_series.push_back(std::move(pts));
  }
  for (const json& label : j.at("labels"))
    gt.labels.push_back({rect_from_json(label.at("box")), label.at("text"),
                         label.at("value"),
                         label.at("axis") == "x" ? AxisKind::x : AxisKind::y});
  for (const json& mark : j.at("marks"))
    gt.marks.push_back({rect_from_json(mark.at("box")), mark.at("series_id"),
                        point_from_json(mark.at("data_point"))});
  gt.corners = quad_from_json(j.at("corners"));
  if (!j.at("applied_homography").is_null())
    gt.applied_homography = homography_from_json(j.at("applied_homography"));
  return gt;
}

// ---------------------------------------------------------------------------
// DetectionSet
// ---------------------------------------------------------------------------

std::string to_json(const DetectionSet& detections) {
  json j;
  j["detections"] = json::array();
  for (const Detection& d : detections.detections) {
    json jd;
    jd["class"] = d.cls == DetectionClass::tick_label ? "tick_label" : "mark";
    jd["box"] = rect_to_json(d.box);
    jd["score"] = d.score;
    if (d.text) jd["text"] = *d.text;
    if (d.embedding) jd["embedding"] = *d.embedding;
    if (d.series_id) jd["series_id"] = *d.series_id;
    j["detections"].push_back(std::move(jd));
  }
  if (detections.corners.keypoints)
    j["corners"] = {{"keypoints", quad_to_json(*detections.corners.keypoints)}};
  else if (detections.corners.mask) {
    const BinaryMask& m = *detections.corners.mask;
    j["corners"] = {{"mask",
                     {{"width", m.width},
                      {"height", m.height},
                      {"rle", rle_encode(m)}}}};
  } else
    j["corners"] = json(nullptr);
  return j.dump();
}

DetectionSet detection_set_from_json(std::string_view text) {
  const json j = parse_json(text, "detection set");
  DetectionSet out;
  for (const json& jd : j.at("detections")) {
    Detection d;
    d.cls = jd.at("class") == "tick_label" ? DetectionClass::tick_label
                                           : DetectionClass::mark;
    d.box = rect_from_json(jd.at("box"));
    d.score = jd.value("score", 1.0);
    if (jd.contains("text")) d.text = jd.at("text").get<std::string>();
    if (jd.contains("embedding"))
      d.embedding = jd.at("embedding").get<Embedding>();
    if (jd.contains("series_id")) d.series_id = jd.at("series_id").get<int>();
    out.detections.push_back(std::move(d));
  }
  if (j.contains("corners") && !j.at("corners").is_null()) {
    const json& jc = j.at("corners");
    if (jc.contains("keypoints"))
      out.corners.keypoints = quad_from_json(jc.at("keypoints"));
    else if (jc.contains("mask")) {
      const json& jm = jc.at("mask");
      out.corners.mask =
          rle_decode(jm.at("width"), jm.at("height"),
                     jm.at("rle").get<std::vector<std::int64_t>>());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SeriesExtraction / failures
// ---------------------------------------------------------------------------

namespace {

json axis_to_json(const AxisModel& m) {
  return {{"a", m.a},
          {"b", m.b},
          {"log_scale", m.log_scale},
          {"inlier_ids", m.inlier_ids}};
}

AxisModel axis_from_json(const json& j) {
  AxisModel m;
  m.a = j.at("a");
  m.b = j.at("b");
  m.log_scale = j.at("log_scale");
  m.inlier_ids = j.at("inlier_ids").get<std::vector<int>>();
  return m;
}

}  // namespace

std::string to_json(const SeriesExtraction& extraction) {
  json j;
  j["lines"] = json::array();
  for (std::size_t i = 0; i < extraction.lines.size(); ++i) {
    json pts = json::array();
    for (const Point2& p : extraction.lines[i]) pts.push_back(point_to_json(p));
    j["lines"].push_back(
        {{"points", std::move(pts)},
         {"confidence", i < extraction.line_confidence.size()
                            ? extraction.line_confidence[i]
                            : 1.0}});
  }
  j["confidence"] = extraction.confidence;
  j["x_axis"] = axis_to_json(extraction.x_axis);
  j["y_axis"] = axis_to_json(extraction.y_axis);
  j["corners"] = quad_to_json(extraction.corners);
  return j.dump();
}

SeriesExtraction series_extraction_from_json(std::string_view text) {
  const json j = parse_json(text, "series extraction");
  SeriesExtraction out;
  for (const json& jl : j.at("lines")) {
    std::vector<Point2> pts;
    for (const json& p : jl.at("points")) pts.push_back(point_from_json(p));
    out.lines.push_back(std::move(pts));
    out.line_confidence.push_back(jl.value("confidence", 1.0));
  }
  out.confidence = j.at("confidence");
  out.x_axis = axis_from_json(j.at("x_axis"));
  out.y_axis = axis_from_json(j.at("y_axis"));
  out.corners = quad_from_json(j.at("corners"));
  return out;
}

std::string to_json(const ExtractionFailure& failure) {
  return json{{"error",
               {{"stage", failure.stage},
                {"code", failure.code},
                {"message", failure.message}}}}
      .dump();
}

std::optional<ExtractionFailure> failure_from_json(std::string_view text) {
  const json j = parse_json(text, "prediction");
  if (!j.contains("error")) return std::nullopt;
  const json& e = j.at("error");
  return ExtractionFailure{e.value("stage", ""), e.value("code", ""),
                           e.value("message", "")};
}

// ---------------------------------------------------------------------------
// Configs
// ---------------------------------------------------------------------------

std::string to_json(const AugmentConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["tps"] = {{"enable", config.tps.enable},
              {"grid", config.tps.grid},
              {"magnitude", config.tps.magnitude}};
  j["perspective"] = {{"enable", config.perspective.enable},
                      {"distortion", config.perspective.distortion}};
  json levels = json::array();
  for (const NoiseLevel& l : config.noise.levels)
    levels.push_back(json::array({l.divisor, l.sigma}));
  j["noise"] = {{"enable", config.noise.enable}, {"levels", std::move(levels)}};
  j["color"] = {{"enable", config.color.enable},
                {"brightness", config.color.brightness},
                {"contrast", config.color.contrast},
                {"saturation", config.color.saturation},
                {"hue_degrees", config.color.hue_degrees}};
  j["blur"] = {{"enable", config.blur.enable},
               {"gauss_sigma", json::array({config.blur.gauss_sigma_lo,
                                            config.blur.gauss_sigma_hi})},
               {"motion_len", json::array({config.blur.motion_len_lo,
                                           config.blur.motion_len_hi})},
               {"motion_angle", json::array({config.blur.motion_angle_lo,
                                             config.blur.motion_angle_hi})}};
  return j.dump(2);
}

AugmentConfig augment_config_from_json(std::string_view text) {
  const json j = parse_json(text, "augment config");
  AugmentConfig c;
  c.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("tps")) {
    const json& t = j.at("tps");
    c.tps.enable = t.value("enable", true);
    c.tps.grid = t.value("grid", 4);
    c.tps.magnitude = t.value("magnitude", 0.02);
  }
  if (j.contains("perspective")) {
    const json& p = j.at("perspective");
    c.perspective.enable = p.value("enable", true);
    c.perspective.distortion = p.value("distortion", 0.5);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    c.noise.enable = n.value("enable", true);
    if (n.contains("levels")) {
      c.noise.levels.clear();
      for (const json& l : n.at("levels"))
        c.noise.levels.push_back({l.at(0), l.at(1)});
    }
  }
  if (j.contains("color")) {
    const json& jc = j.at("color");
    c.color.enable = jc.value("enable", true);
    c.color.brightness = jc.value("brightness", 0.25);
    c.color.contrast = jc.value("contrast", 0.25);
    c.color.saturation = jc.value("saturation", 0.30);
    c.color.hue_degrees = jc.value("hue_degrees", 15.0);
  }
  if (j.contains("blur")) {
    const json& b = j.at("blur");
    c.blur.enable = b.value("enable", true);
    if (b.contains("gauss_sigma")) {
      c.blur.gauss_sigma_lo = b.at("gauss_sigma").at(0);
      c.blur.gauss_sigma_hi = b.at("gauss_sigma").at(1);
    }
    if (b.contains("motion_len")) {
      c.blur.motion_len_lo = b.at("motion_len").at(0);
      c.blur.motion_len_hi = b.at("motion_len").at(1);
    }
    if (b.contains("motion_angle")) {
      c.blur.motion_angle_lo = b.at("motion_angle").at(0);
      c.blur.motion_angle_hi = b.at("motion_angle").at(1);
    }
  }
  return c;
}

std::string to_json(const NoiseModel& noise) {
  return json{{"box_jitter_sigma", noise.box_jitter_sigma},
              {"drop_prob", noise.drop_prob},
              {"spurious_prob", noise.spurious_prob},
              {"ocr_char_sub_prob", noise.ocr_char_sub_prob},
              {"corner_jitter_sigma", noise.corner_jitter_sigma},
              {"embedding_noise_sigma", noise.embedding_noise_sigma},
              {"seed", noise.seed}}
      .dump(2);
}

NoiseModel noise_model_from_json(std::string_view text) {
  const json j = parse_json(text, "noise model");
  NoiseModel n;
  n.box_jitter_sigma = j.value("box_jitter_sigma", 0.0);
  n.drop_prob = j.value("drop_prob", 0.0);
  n.spurious_prob = j.value("spurious_prob", 0.0);
  n.ocr_char_sub_prob = j.value("ocr_char_sub_prob", 0.0);
  n.corner_jitter_sigma = j.value("corner_jitter_sigma", 0.0);
  n.embedding_noise_sigma = j.value("embedding_noise_sigma", 0.0);
  n.seed = j.value("seed", std::uint64_t{0});
  return n;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::string to_json_line(const ManifestEntry& entry) {
  json j{{"index", entry.index}, {"image", entry.image}, {"gt", entry.gt}};
  if (!entry.clean_image.empty()) j["clean_image"] = entry.clean_image;
  return j.dump();
}

std::vector<ManifestEntry> manifest_from_jsonl(std::string_view jsonl) {
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = parse_json(line, "manifest line");
    entries.push_back({j.at("index"), j.at("image"), j.at("gt"),
                       j.value("clean_image", "")});
  }
  return entries;
}

// ---------------------------------------------------------------------------
// RLE masks
// ---------------------------------------------------------------------------

std::vector<std::int64_t> rle_encode(const BinaryMask& mask) {
  std::vector<std::int64_t> runs;
  std::int64_t run = 0;
  bool current = false;  // runs start counting zeros
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const bool v = mask.bits[i] != 0;
    if (v == current) {
      ++run;
    } else {
      runs.push_back(run);
      current = v;
      run = 1;
    }
  }
  runs.push_back(run);
  return runs;
}

BinaryMask rle_decode(int width, int height, std::span<const std::int64_t> runs) {
  BinaryMask mask(width, height);
  std::size_t pos = 0;
  bool current = false;
  for (const std::int64_t run : runs) {
    if (run < 0 || pos + std::size_t(run) > mask.bits.size())
      raise(errc::io_error, "RLE runs exceed mask size");
    if (current)
      std::fill_n(mask.bits.begin() + std::ptrdiff_t(pos), run, std::uint8_t{1});
    pos += std::size_t(run);
    current = !current;
  }
  if (pos != mask.bits.size())
    raise(errc::io_error, "RLE runs do not cover the mask");
  return mask;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_error, "cannot write " + tmp);
    out << content;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(errc::io_error, "cannot rename " + tmp + " to " + path);
}

}  // namespace chartex
