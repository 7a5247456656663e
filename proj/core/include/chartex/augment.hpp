#pragma once

#include <chartex/geometry.hpp>
#include <chartex/image.hpp>
#include <chartex/rng.hpp>
#include <chartex/synthgen.hpp>
#include <chartex/tps.hpp>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace chartex {

struct TpsStage {
  bool enable = true;
  int grid = 4;            // control points per side
  double magnitude = 0.02; // max displacement, fraction of image dimension
};

struct PerspectiveStage {
  bool enable = true;
  double distortion = 0.5;  // in [0, 1)
};

struct NoiseLevel {
  int divisor = 1;  // noise field resolution = image / divisor
  double sigma = 0; // 8-bit units
};

struct NoiseStage {
  bool enable = true;
  std::vector<NoiseLevel> levels{{1, 6.0}, {4, 10.0}, {16, 14.0}};
};

struct ColorStage {
  bool enable = true;
  double brightness = 0.25;
  double contrast = 0.25;
  double saturation = 0.30;
  double hue_degrees = 15.0;
};

struct BlurStage {
  bool enable = true;
  double gauss_sigma_lo = 0.6;
  double gauss_sigma_hi = 1.8;
  int motion_len_lo = 5;
  int motion_len_hi = 13;
  double motion_angle_lo = 0.0;
  double motion_angle_hi = 180.0;
};

struct AugmentConfig {
  std::uint64_t seed = 0;
  TpsStage tps;
  PerspectiveStage perspective;
  NoiseStage noise;
  ColorStage color;
  BlurStage blur;

  static AugmentConfig all_disabled() {
    AugmentConfig c;
    c.tps.enable = c.perspective.enable = c.noise.enable = c.color.enable =
        c.blur.enable = false;
    return c;
  }
};

/// Dense forward point map of the TPS stage: entry (x, y) holds the warped
/// coordinate of source pixel (x, y). Carries the displacement to the
/// ground-truth annotations.
struct WarpField {
  int width = 0;
  int height = 0;
  bool identity = true;
  std::vector<float> map;  // 2 floats per pixel, (x, y)

  static WarpField make_identity(int w, int h);

  /// Bilinear interpolation of the stored map at a real source point.
  Point2 warp_point(Point2 src) const;
};

/// Warps the image through an explicit TPS model (exposed for tests that
/// verify the kernel analytically) and returns the forward field.
std::pair<RasterImage, WarpField> tps_warp(const RasterImage& img,
                                           const ThinPlateSpline& tps,
                                           Rgb fill);

/// Random control-grid TPS per the stage config. Displacements are drawn
/// uniformly, then rescaled so the maximum field displacement stays within
/// magnitude * max(width, height).
std::pair<RasterImage, WarpField> apply_tps(const RasterImage& img,
                                            const TpsStage& config, Rng& rng,
                                            Rgb fill = {255, 255, 255});

/// Displaces each image corner inward by uniform offsets up to
/// distortion/2 of each dimension and warps through the induced
/// homography (returned). Collinear corner draws are resampled.
std::pair<RasterImage, Homography> apply_perspective(const RasterImage& img,
                                                     double distortion,
                                                     Rng& rng,
                                                     Rgb fill = {255, 255, 255});

/// Gaussian fields at each configured scale, bilinearly upsampled, summed,
/// clamped to [0, 255]. Independent per channel.
RasterImage apply_noise(const RasterImage& img, const NoiseStage& config,
                        Rng& rng);

/// Affine brightness/contrast plus hue rotation and saturation scaling.
RasterImage apply_color(const RasterImage& img, const ColorStage& config,
                        Rng& rng);

/// Gaussian or motion blur, chosen at random.
RasterImage apply_blur(const RasterImage& img, const BlurStage& config,
                       Rng& rng);

/// Full chain in fixed order TPS -> perspective -> noise -> color -> blur,
/// with ground truth mapped through the TPS field and the homography.
/// Each stage draws from its own derived stream, so toggling one stage
/// never changes another stage's randomness.
std::pair<RasterImage, GroundTruth> augment(const RasterImage& img,
                                            const GroundTruth& gt,
                                            const AugmentConfig& config);

}  // namespace chartex
