// chartex — synthesize camera-like line-chart images with exact ground
// truth, recover the numeric series from detections, and score recovery
// with a tolerance-based F1.
//
// Subcommands: gen | extract | eval | overlay | ablate

#include <chartex/error.hpp>
#include <chartex/runner.hpp>
#include <chartex/serialize.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

using namespace chartex;

CornerMode parse_corner_mode(const std::string& s) {
  if (s == "keypoint") return CornerMode::keypoint;
  if (s == "mask") return CornerMode::mask;
  throw CLI::ValidationError("--corner-mode must be keypoint or mask");
}

DetectorKind parse_detector(const std::string& s) {
  if (s == "oracle") return DetectorKind::oracle;
  if (s == "noisy") return DetectorKind::noisy;
  if (s == "import") return DetectorKind::import_json;
  throw CLI::ValidationError("--detector must be oracle, noisy or import");
}

GroupingMode parse_grouping(const std::string& s) {
  if (s == "auto") return GroupingMode::automatic;
  if (s == "cluster") return GroupingMode::cluster;
  if (s == "classify") return GroupingMode::classify;
  throw CLI::ValidationError("--grouping must be auto, cluster or classify");
}

void print_eval(const EvalResult& r) {
  std::printf("images      %d (%d failed)\n", r.images, r.failed_images);
  std::printf("points      tp=%lld pred=%lld gt=%lld\n",
              static_cast<long long>(r.tp), static_cast<long long>(r.pred_points),
              static_cast<long long>(r.gt_points));
  std::printf("precision   %.4f\n", r.precision);
  std::printf("recall      %.4f\n", r.recall);
  std::printf("F1 (micro)  %.2f\n", r.micro_f1);
  std::printf("F1 (macro)  %.2f\n", r.macro_f1);
  if (!r.sweep.empty()) {
    std::printf("tolerance sweep:\n");
    for (const auto& [magnitude, f1] : r.sweep)
      std::printf("  %-10g %.2f\n", magnitude, f1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic line-chart generation, extraction and evaluation"};
  app.require_subcommand(1);

  // --- gen -----------------------------------------------------------------
  GenOptions gen;
  std::string gen_augment_path;
  bool gen_augment_default = false;
  auto* cmd_gen = app.add_subcommand("gen", "generate a chart dataset");
  cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();
  cmd_gen->add_option("--seed", gen.seed, "master seed")->required();
  cmd_gen->add_option("--count", gen.count, "number of charts");
  cmd_gen->add_option("--profile", gen.profile, "general | audiogram");
  cmd_gen->add_option("--augment-config", gen_augment_path,
                      "JSON augmentation config (omit for clean charts)");
  cmd_gen->add_flag("--augment", gen_augment_default,
                    "use the default augmentation chain");
  cmd_gen->add_option("--jobs", gen.jobs, "worker threads");

  // --- extract ---------------------------------------------------------------
  ExtractOptions extract;
  std::string extract_detector = "oracle", extract_corners = "keypoint";
  std::string extract_noise_path, extract_grouping = "auto";
  auto* cmd_extract =
      app.add_subcommand("extract", "recover series from a dataset");
  cmd_extract->add_option("--dataset", extract.dataset_dir, "dataset directory")
      ->required();
  cmd_extract->add_option("--out", extract.out_dir, "prediction directory")
      ->required();
  cmd_extract->add_option("--detector", extract_detector,
                          "oracle | noisy | import");
  cmd_extract->add_option("--noise-config", extract_noise_path,
                          "JSON noise model for the noisy detector");
  cmd_extract->add_option("--import-dir", extract.import_dir,
                          "directory of det_NNNNNN.json files to import");
  cmd_extract->add_option("--corner-mode", extract_corners, "keypoint | mask");
  cmd_extract->add_option("--seed", extract.seed, "detector seed");
  cmd_extract->add_flag("--log-x", extract.params.log_x,
                        "fit the x axis in log10 space");
  cmd_extract->add_option("--grouping", extract_grouping,
                          "auto | cluster | classify");
  cmd_extract->add_option("--cluster-threshold", extract.params.cluster_threshold,
                          "probability threshold for mark clustering");
  cmd_extract->add_option("--jobs", extract.jobs, "worker threads");

  // --- eval ------------------------------------------------------------------
  EvalOptions eval;
  std::string eval_kind = "relative";
  bool eval_categorical = false;
  auto* cmd_eval = app.add_subcommand("eval", "score predictions against gt");
  cmd_eval->add_option("--dataset", eval.dataset_dir, "dataset directory")
      ->required();
  cmd_eval->add_option("--pred", eval.pred_dir, "prediction directory")
      ->required();
  cmd_eval->add_option("--tolerance", eval.tolerance.magnitude,
                       "tolerance magnitude (fraction or data units)");
  cmd_eval->add_option("--tolerance-kind", eval_kind, "relative | absolute");
  cmd_eval->add_flag("--categorical-x", eval_categorical,
                     "match x on exact tick bins (audiogram-style)");
  cmd_eval->add_option("--sweep", eval.sweep,
                       "extra tolerance magnitudes for a sweep")
      ->delimiter(',');
  cmd_eval->add_option("--report", eval.report_path, "JSONL per-image report");

  // --- overlay -----------------------------------------------------------------
  OverlayOptions overlay;
  auto* cmd_overlay = app.add_subcommand("overlay", "render debug overlays");
  cmd_overlay->add_option("--dataset", overlay.dataset_dir, "dataset directory")
      ->required();
  cmd_overlay->add_option("--pred", overlay.pred_dir, "prediction directory")
      ->required();
  cmd_overlay->add_option("--out", overlay.out_dir, "overlay directory")
      ->required();

  // --- ablate ------------------------------------------------------------------
  AblateOptions ablate;
  std::string ablate_corners = "keypoint";
  auto* cmd_ablate =
      app.add_subcommand("ablate", "transform ladder x detector-noise grid");
  cmd_ablate->add_option("--out", ablate.out_dir, "working directory")->required();
  cmd_ablate->add_option("--seed", ablate.seed, "master seed")->required();
  cmd_ablate->add_option("--count", ablate.count, "charts per ladder row");
  cmd_ablate->add_option("--profile", ablate.profile, "general | audiogram");
  cmd_ablate->add_option("--jitter-grid", ablate.box_jitter_grid,
                         "box jitter sigmas for the noise grid")
      ->delimiter(',');
  cmd_ablate->add_option("--corner-mode", ablate_corners, "keypoint | mask");
  cmd_ablate->add_option("--jobs", ablate.jobs, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_gen) {
      if (!gen_augment_path.empty())
        gen.augment = augment_config_from_json(read_text_file(gen_augment_path));
      else if (gen_augment_default)
        gen.augment = AugmentConfig{};
      const GenResult r = run_gen(gen);
      std::printf("wrote %d charts, manifest %s\n", r.written,
                  r.manifest_path.c_str());
    } else if (*cmd_extract) {
      extract.detector = parse_detector(extract_detector);
      extract.corner_mode = parse_corner_mode(extract_corners);
      extract.params.grouping_mode = parse_grouping(extract_grouping);
      if (!extract_noise_path.empty())
        extract.noise = noise_model_from_json(read_text_file(extract_noise_path));
      const ExtractResult r = run_extract(extract);
      std::printf("extracted %d images, %d failed\n", r.succeeded, r.failed);
      if (r.succeeded == 0 && r.failed > 0) return 2;
    } else if (*cmd_eval) {
      eval.tolerance.kind = eval_kind == "absolute" ? ToleranceKind::absolute
                                                    : ToleranceKind::relative;
      eval.tolerance.categorical_x = eval_categorical;
      print_eval(run_eval(eval));
    } else if (*cmd_overlay) {
      std::printf("wrote %d overlays\n", run_overlay(overlay));
    } else if (*cmd_ablate) {
      ablate.corner_mode = parse_corner_mode(ablate_corners);
      const auto rows = run_ablate(ablate);
      std::printf("transforms,box_jitter_sigma,precision,recall,f1\n");
      for (const AblateRow& row : rows)
        std::printf("%s,%g,%.4f,%.4f,%.2f\n", row.transforms.c_str(),
                    row.box_jitter_sigma, row.precision, row.recall, row.f1);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s%s%s]: %s\n",
                 std::string(errc_name(e.code())).c_str(),
                 e.stage().empty() ? "" : " at stage ",
                 e.stage().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
