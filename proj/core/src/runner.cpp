#include <chartex/runner.hpp>

#include <chartex/draw.hpp>
#include <chartex/error.hpp>
#include <chartex/rng.hpp>
#include <chartex/serialize.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace chartex {

namespace fs = std::filesystem;
using json = nlohmann::json;

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::clamp(jobs, 1, std::max(1, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> workers;
  workers.reserve(std::size_t(jobs));
  for (int w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (std::thread& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

std::string index_name(const char* prefix, int index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d%s", prefix, index, suffix);
  return buf;
}

void write_png_atomic(const RasterImage& img, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  write_png(img, tmp.string());
  fs::rename(tmp, path);
}

}  // namespace

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

GenResult run_gen(const GenOptions& options) {
  const DomainProfile profile = DomainProfile::by_name(options.profile);
  const fs::path out(options.out_dir);
  fs::create_directories(out);

  parallel_for(options.count, options.jobs, [&](int i) {
    const ChartSpec spec = sample_spec(options.seed, std::uint64_t(i), profile);
    auto [image, gt] = render_chart(spec);
    if (options.augment) {
      AugmentConfig config = *options.augment;
      config.seed = derive_seed(options.seed, std::uint64_t(i), "augment");
      write_png_atomic(image, out / index_name("img", i, "_clean.png"));
      auto [aug_image, aug_gt] = augment(image, gt, config);
      image = std::move(aug_image);
      gt = std::move(aug_gt);
    }
    write_png_atomic(image, out / index_name("img", i, ".png"));
    write_text_file((out / index_name("gt", i, ".json")).string(), to_json(gt));
  });

  std::ostringstream manifest;
  for (int i = 0; i < options.count; ++i) {
    ManifestEntry entry;
    entry.index = i;
    entry.image = index_name("img", i, ".png");
    entry.gt = index_name("gt", i, ".json");
    if (options.augment) entry.clean_image = index_name("img", i, "_clean.png");
    manifest << to_json_line(entry) << "\n";
  }
  const fs::path manifest_path = out / "manifest.jsonl";
  write_text_file(manifest_path.string(), manifest.str());
  return {options.count, manifest_path.string()};
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

ExtractResult run_extract(const ExtractOptions& options) {
  const fs::path dataset(options.dataset_dir);
  const fs::path out(options.out_dir);
  fs::create_directories(out);
  const auto manifest =
      manifest_from_jsonl(read_text_file((dataset / "manifest.jsonl").string()));

  std::atomic<int> succeeded{0}, failed{0};
  parallel_for(static_cast<int>(manifest.size()), options.jobs, [&](int k) {
    const ManifestEntry& entry = manifest[std::size_t(k)];
    const GroundTruth gt =
        ground_truth_from_json(read_text_file((dataset / entry.gt).string()));

    DetectionSet detections;
    switch (options.detector) {
      case DetectorKind::oracle:
        detections = oracle_detect(gt, options.corner_mode);
        break;
      case DetectorKind::noisy: {
        NoiseModel noise = options.noise;
        noise.seed =
            derive_seed(options.seed, std::uint64_t(entry.index), "detect");
        detections = noisy_detect(gt, noise, options.corner_mode);
        break;
      }
      case DetectorKind::import_json:
        detections = detection_set_from_json(read_text_file(
            (fs::path(options.import_dir) /
             index_name("det", entry.index, ".json"))
                .string()));
        break;
    }
    write_text_file(
        (out / index_name("det", entry.index, ".json")).string(),
        to_json(detections));

    std::string prediction;
    try {
      const SeriesExtraction extraction = extract_series(detections, options.params);
      prediction = to_json(extraction);
      succeeded.fetch_add(1);
    } catch (const Error& e) {
      prediction = to_json(ExtractionFailure{
          e.stage(), std::string(errc_name(e.code())), e.what()});
      failed.fetch_add(1);
    }
    write_text_file((out / index_name("pred", entry.index, ".json")).string(),
                    prediction);
  });
  return {succeeded.load(), failed.load()};
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

EvalResult run_eval(const EvalOptions& options) {
  const fs::path dataset(options.dataset_dir);
  const fs::path preds(options.pred_dir);
  const auto manifest =
      manifest_from_jsonl(read_text_file((dataset / "manifest.jsonl").string()));

  EvalResult result;
  double macro_acc = 0;
  std::ostringstream report;
  struct ImageLines {
    std::vector<std::vector<Point2>> pred, gt;
  };
  std::vector<ImageLines> kept;  // for the tolerance sweep

  for (const ManifestEntry& entry : manifest) {
    const GroundTruth gt =
        ground_truth_from_json(read_text_file((dataset / entry.gt).string()));
    const fs::path pred_path = preds / index_name("pred", entry.index, ".json");
    if (!fs::exists(pred_path))
      raise(errc::io_error,
            "prediction missing for manifest index " + std::to_string(entry.index));
    const std::string body = read_text_file(pred_path.string());

    long long gt_total = 0;
    for (const auto& line : gt.raw_series) gt_total += std::ssize(line);

    ++result.images;
    if (const auto failure = failure_from_json(body)) {
      ++result.failed_images;
      result.gt_points += gt_total;
      kept.push_back({{}, gt.raw_series});
      report << json{{"index", entry.index},
                     {"failed", true},
                     {"stage", failure->stage},
                     {"code", failure->code},
                     {"f1", 0.0}}
                    .dump()
             << "\n";
      continue;
    }

    const SeriesExtraction extraction = series_extraction_from_json(body);
    const MatchReport match = evaluate(extraction.lines, gt.raw_series,
                                       options.tolerance);
    result.tp += match.tp;
    result.pred_points += match.pred_points;
    result.gt_points += match.gt_points;
    macro_acc += match.f1;
    kept.push_back({extraction.lines, gt.raw_series});
    report << json{{"index", entry.index},
                   {"failed", false},
                   {"precision", match.precision},
                   {"recall", match.recall},
                   {"f1", match.f1},
                   {"tp", match.tp},
                   {"pred_points", match.pred_points},
                   {"gt_points", match.gt_points}}
                  .dump()
           << "\n";
  }

  result.precision =
      result.pred_points > 0 ? double(result.tp) / double(result.pred_points) : 0;
  result.recall =
      result.gt_points > 0 ? double(result.tp) / double(result.gt_points) : 0;
  result.micro_f1 = f1_from_counts(result.tp, result.pred_points, result.gt_points);
  result.macro_f1 = result.images > 0 ? macro_acc / result.images : 0;

  for (const double magnitude : options.sweep) {
    Tolerance tol = options.tolerance;
    tol.magnitude = magnitude;
    long long tp = 0, pp = 0, gp = 0;
    for (const ImageLines& lines : kept) {
      const MatchReport m = evaluate(lines.pred, lines.gt, tol);
      tp += m.tp;
      pp += m.pred_points;
      gp += m.gt_points;
    }
    result.sweep.emplace_back(magnitude, f1_from_counts(tp, pp, gp));
  }

  if (!options.report_path.empty())
    write_text_file(options.report_path, report.str());
  return result;
}

// ---------------------------------------------------------------------------
// overlay
// ---------------------------------------------------------------------------

namespace {

constexpr Rgb kLabelBox{40, 90, 230};
constexpr Rgb kMarkBox{230, 60, 60};
constexpr Rgb kCornerDot{0, 185, 70};
constexpr Rgb kGridLine{255, 165, 40};
constexpr Rgb kPointCross{200, 0, 200};
constexpr Rgb kBanner{200, 30, 30};

void draw_rect_outline(RasterImage& img, const Rect& r, Rgb color) {
  const auto c = r.corners();
  for (int i = 0; i < 4; ++i)
    draw_segment(img, c[std::size_t(i)], c[std::size_t((i + 1) % 4)], 1.4, color);
}

void draw_failure_banner(RasterImage& img) {
  for (int y = 0; y < std::min(26, img.height); ++y)
    for (int x = 0; x < img.width; ++x) img.set(x, y, kBanner);
  draw_segment(img, {6, 5}, {20, 21}, 3.0, {255, 255, 255});
  draw_segment(img, {6, 21}, {20, 5}, 3.0, {255, 255, 255});
}

}  // namespace

int run_overlay(const OverlayOptions& options) {
  const fs::path dataset(options.dataset_dir);
  const fs::path preds(options.pred_dir);
  const fs::path out(options.out_dir);
  fs::create_directories(out);
  const auto manifest =
      manifest_from_jsonl(read_text_file((dataset / "manifest.jsonl").string()));

  int written = 0;
  for (const ManifestEntry& entry : manifest) {
    RasterImage img = read_png((dataset / entry.image).string());
    const std::string body =
        read_text_file((preds / index_name("pred", entry.index, ".json")).string());

    // Detection boxes, when the extract step left its detection dump.
    const fs::path det_path = preds / index_name("det", entry.index, ".json");
    if (fs::exists(det_path)) {
      const DetectionSet detections =
          detection_set_from_json(read_text_file(det_path.string()));
      for (const Detection& d : detections.detections)
        draw_rect_outline(img, d.box,
                          d.cls == DetectionClass::tick_label ? kLabelBox : kMarkBox);
    }

    if (failure_from_json(body)) {
      draw_failure_banner(img);
    } else {
      const SeriesExtraction extraction = series_extraction_from_json(body);
      const Homography from_canonical = invert(canonicalize(extraction.corners));

      // Canonical unit-square grid reprojected into the image.
      for (int k = 0; k <= 4; ++k) {
        const double u = k / 4.0;
        std::vector<Point2> horizontal, vertical;
        for (int t = 0; t <= 64; ++t) {
          const double s = t / 64.0;
          horizontal.push_back(apply(from_canonical, {s, u}));
          vertical.push_back(apply(from_canonical, {u, s}));
        }
        draw_polyline(img, horizontal, 1.0, kGridLine);
        draw_polyline(img, vertical, 1.0, kGridLine);
      }
      for (const Point2& c : extraction.corners) fill_circle(img, c, 4.0, kCornerDot);

      for (const auto& line : extraction.lines)
        for (const Point2& p : line) {
          const Point2 q = apply(from_canonical,
                                 {extraction.x_axis.coord_of(p.x),
                                  extraction.y_axis.coord_of(p.y)});
          draw_segment(img, {q.x - 5, q.y}, {q.x + 5, q.y}, 1.6, kPointCross);
          draw_segment(img, {q.x, q.y - 5}, {q.x, q.y + 5}, 1.6, kPointCross);
        }
    }

    write_png_atomic(img, out / index_name("overlay", entry.index, ".png"));
    ++written;
  }
  return written;
}

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

namespace {

AugmentConfig ladder_config(int step) {
  // Cumulative enablement in the reporting order: baseline, +perspective,
  // +color, +blur/noise, +tps. The application order inside augment()
  // stays fixed.
  AugmentConfig c = AugmentConfig::all_disabled();
  if (step >= 1) c.perspective.enable = true;
  if (step >= 2) c.color.enable = true;
  if (step >= 3) c.noise.enable = c.blur.enable = true;
  if (step >= 4) c.tps.enable = true;
  return c;
}

}  // namespace

std::vector<AblateRow> run_ablate(const AblateOptions& options) {
  static const char* kLadder[] = {"baseline", "+perspective", "+color",
                                  "+blur_noise", "+tps"};
  const fs::path out(options.out_dir);
  fs::create_directories(out);

  std::vector<AblateRow> rows;
  for (int step = 0; step < 5; ++step) {
    GenOptions gen;
    gen.out_dir = (out / ("ds_" + std::to_string(step))).string();
    gen.seed = options.seed;
    gen.count = options.count;
    gen.profile = options.profile;
    gen.jobs = options.jobs;
    if (step > 0) gen.augment = ladder_config(step);
    run_gen(gen);

    for (const double sigma : options.box_jitter_grid) {
      ExtractOptions extract;
      extract.dataset_dir = gen.out_dir;
      extract.out_dir =
          (out / ("pred_" + std::to_string(step) + "_j" + std::to_string(sigma)))
              .string();
      extract.detector = DetectorKind::noisy;
      extract.noise.box_jitter_sigma = sigma;
      extract.corner_mode = options.corner_mode;
      extract.seed = options.seed;
      extract.jobs = options.jobs;
      run_extract(extract);

      EvalOptions eval;
      eval.dataset_dir = gen.out_dir;
      eval.pred_dir = extract.out_dir;
      const EvalResult r = run_eval(eval);
      rows.push_back({kLadder[step], sigma, r.precision, r.recall, r.micro_f1});
    }
  }

  std::ostringstream csv;
  csv << "transforms,box_jitter_sigma,precision,recall,f1\n";
  for (const AblateRow& row : rows)
    csv << row.transforms << "," << row.box_jitter_sigma << "," << row.precision
        << "," << row.recall << "," << row.f1 << "\n";
  write_text_file((out / "ablation.csv").string(), csv.str());
  return rows;
}

}  // namespace chartex
