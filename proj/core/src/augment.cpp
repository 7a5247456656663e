#include <chartex/augment.hpp>

#include <chartex/draw.hpp>
#include <chartex/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chartex {

// ---------------------------------------------------------------------------
// WarpField
// ---------------------------------------------------------------------------

WarpField WarpField::make_identity(int w, int h) {
  WarpField f;
  f.width = w;
  f.height = h;
  f.identity = true;
  return f;
}

Point2 WarpField::warp_point(Point2 src) const {
  if (identity) return src;
  const double x = std::clamp(src.x, 0.0, double(width - 1));
  const double y = std::clamp(src.y, 0.0, double(height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = x - x0, fy = y - y0;
  auto at = [&](int xi, int yi, int c) {
    return double(map[(std::size_t(yi) * width + xi) * 2 + c]);
  };
  Point2 out;
  for (int c = 0; c < 2; ++c) {
    const double top = at(x0, y0, c) * (1 - fx) + at(x1, y0, c) * fx;
    const double bot = at(x0, y1, c) * (1 - fx) + at(x1, y1, c) * fx;
    (c == 0 ? out.x : out.y) = top * (1 - fy) + bot * fy;
  }
  return out;
}

// ---------------------------------------------------------------------------
// TPS stage
// ---------------------------------------------------------------------------

std::pair<RasterImage, WarpField> tps_warp(const RasterImage& img,
                                           const ThinPlateSpline& tps,
                                           Rgb fill) {
  const int w = img.width, h = img.height;
  WarpField field;
  field.width = w;
  field.height = h;
  field.identity = false;
  field.map.resize(std::size_t(w) * h * 2);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Point2 dst = tps.evaluate({double(x), double(y)});
      field.map[(std::size_t(y) * w + x) * 2] = float(dst.x);
      field.map[(std::size_t(y) * w + x) * 2 + 1] = float(dst.y);
    }

  // Backward map on a coarse lattice (the warp is smooth), then bilinear.
  constexpr int kStep = 8;
  const int gw = w / kStep + 2, gh = h / kStep + 2;
  std::vector<Point2> lattice(std::size_t(gw) * gh);
  for (int gy = 0; gy < gh; ++gy)
    for (int gx = 0; gx < gw; ++gx) {
      const Point2 q{double(std::min(gx * kStep, w - 1)),
                     double(std::min(gy * kStep, h - 1))};
      lattice[std::size_t(gy) * gw + gx] = tps.invert(q);
    }

  RasterImage out(w, h, fill);
  for (int y = 0; y < h; ++y) {
    const double gy = std::min(double(y) / kStep, double(gh - 2));
    const int gy0 = static_cast<int>(gy);
    const double fy = gy - gy0;
    for (int x = 0; x < w; ++x) {
      const double gx = std::min(double(x) / kStep, double(gw - 2));
      const int gx0 = static_cast<int>(gx);
      const double fx = gx - gx0;
      const Point2 p00 = lattice[std::size_t(gy0) * gw + gx0];
      const Point2 p10 = lattice[std::size_t(gy0) * gw + gx0 + 1];
      const Point2 p01 = lattice[std::size_t(gy0 + 1) * gw + gx0];
      const Point2 p11 = lattice[std::size_t(gy0 + 1) * gw + gx0 + 1];
      const Point2 src = (1 - fy) * ((1 - fx) * p00 + fx * p10) +
                         fy * ((1 - fx) * p01 + fx * p11);
      out.set(x, y, sample_bilinear(img, src.x, src.y, fill));
    }
  }
  return {std::move(out), std::move(field)};
}

std::pair<RasterImage, WarpField> apply_tps(const RasterImage& img,
                                            const TpsStage& config, Rng& rng,
                                            Rgb fill) {
  const int w = img.width, h = img.height;
  const double limit = config.magnitude * std::max(w, h);
  const int g = std::max(2, config.grid);

  std::vector<Point2> controls, targets;
  for (int gy = 0; gy < g; ++gy)
    for (int gx = 0; gx < g; ++gx) {
      const Point2 c{double(gx) * (w - 1) / (g - 1),
                     double(gy) * (h - 1) / (g - 1)};
      controls.push_back(c);
      targets.push_back(
          {c.x + rng.uniform(-limit, limit), c.y + rng.uniform(-limit, limit)});
    }

  if (config.magnitude <= 0)
    return {img, WarpField::make_identity(w, h)};

  // The interpolant can overshoot between controls; since TPS is linear in
  // the displacements, rescale them so the field maximum stays in bound.
  ThinPlateSpline tps(controls, targets);
  double max_disp = 0;
  for (int y = 0; y < h; y += 4)
    for (int x = 0; x < w; x += 4) {
      const Point2 p{double(x), double(y)};
      max_disp = std::max(max_disp, distance(tps.evaluate(p), p));
    }
  if (max_disp > limit) {
    const double s = 0.995 * limit / max_disp;
    for (std::size_t i = 0; i < targets.size(); ++i)
      targets[i] = controls[i] + s * (targets[i] - controls[i]);
    tps = ThinPlateSpline(controls, targets);
  }
  return tps_warp(img, tps, fill);
}

// ---------------------------------------------------------------------------
// Perspective stage
// ---------------------------------------------------------------------------

std::pair<RasterImage, Homography> apply_perspective(const RasterImage& img,
                                                     double distortion,
                                                     Rng& rng, Rgb fill) {
  if (distortion < 0 || distortion >= 1)
    raise(errc::invalid_argument, "perspective distortion must be in [0, 1)");
  const double w = img.width - 1.0, h = img.height - 1.0;
  const Quad src = {{{0, 0}, {0, h}, {w, h}, {w, 0}}};

  Homography hom;
  for (int attempt = 0;; ++attempt) {
    const double mx = distortion * w / 2, my = distortion * h / 2;
    const Quad dst = {{{rng.uniform(0, mx), rng.uniform(0, my)},
                       {rng.uniform(0, mx), h - rng.uniform(0, my)},
                       {w - rng.uniform(0, mx), h - rng.uniform(0, my)},
                       {w - rng.uniform(0, mx), rng.uniform(0, my)}}};
    try {
      hom = solve_from_corners(src, dst);
      break;
    } catch (const Error& e) {
      if (e.code() != errc::degenerate_corners || attempt > 64) throw;
    }
  }

  const Homography inv = invert(hom);
  RasterImage out(img.width, img.height, fill);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double denom = inv.m[6] * x + inv.m[7] * y + inv.m[8];
      if (std::abs(denom) <= 1e-12) continue;  // stays at fill
      const double sx = (inv.m[0] * x + inv.m[1] * y + inv.m[2]) / denom;
      const double sy = (inv.m[3] * x + inv.m[4] * y + inv.m[5]) / denom;
      out.set(x, y, sample_bilinear(img, sx, sy, fill));
    }
  return {std::move(out), hom};
}

// ---------------------------------------------------------------------------
// Photometric stages
// ---------------------------------------------------------------------------

RasterImage apply_noise(const RasterImage& img, const NoiseStage& config,
                        Rng& rng) {
  const int w = img.width, h = img.height;
  std::vector<float> acc(std::size_t(w) * h * 3, 0.f);
  for (const NoiseLevel& level : config.levels) {
    const int div = std::max(1, level.divisor);
    const int lw = (w + div - 1) / div, lh = (h + div - 1) / div;
    std::vector<float> field(std::size_t(lw) * lh * 3);
    for (float& v : field) v = float(rng.normal(0.0, level.sigma));
    if (level.sigma <= 0) continue;
    for (int y = 0; y < h; ++y) {
      const double sy =
          std::clamp((y + 0.5) / div - 0.5, 0.0, double(lh - 1));
      const int y0 = static_cast<int>(sy);
      const int y1 = std::min(y0 + 1, lh - 1);
      const double fy = sy - y0;
      for (int x = 0; x < w; ++x) {
        const double sx =
            std::clamp((x + 0.5) / div - 0.5, 0.0, double(lw - 1));
        const int x0 = static_cast<int>(sx);
        const int x1 = std::min(x0 + 1, lw - 1);
        const double fx = sx - x0;
        for (int c = 0; c < 3; ++c) {
          auto at = [&](int xi, int yi) {
            return field[(std::size_t(yi) * lw + xi) * 3 + c];
          };
          const double top = at(x0, y0) * (1 - fx) + at(x1, y0) * fx;
          const double bot = at(x0, y1) * (1 - fx) + at(x1, y1) * fx;
          acc[(std::size_t(y) * w + x) * 3 + c] += float(top * (1 - fy) + bot * fy);
        }
      }
    }
  }
  RasterImage out = img;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double v = out.pixels[i] + acc[i];
    out.pixels[i] = static_cast<std::uint8_t>(
        std::lround(std::clamp(v, 0.0, 255.0)));
  }
  return out;
}

namespace {

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  v = mx;
  const double d = mx - mn;
  s = mx > 0 ? d / mx : 0;
  if (d <= 0) {
    h = 0;
    return;
  }
  if (mx == r)
    h = 60 * std::fmod((g - b) / d, 6.0);
  else if (mx == g)
    h = 60 * ((b - r) / d + 2);
  else
    h = 60 * ((r - g) / d + 4);
  if (h < 0) h += 360;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double c = v * s;
  const double hp = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 60.0;
  const double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
  const double m = v - c;
  double rp = 0, gp = 0, bp = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: rp = c; gp = x; break;
    case 1: rp = x; gp = c; break;
    case 2: gp = c; bp = x; break;
    case 3: gp = x; bp = c; break;
    case 4: rp = x; bp = c; break;
    default: rp = c; bp = x; break;
  }
  r = rp + m;
  g = gp + m;
  b = bp + m;
}

}  // namespace

RasterImage apply_color(const RasterImage& img, const ColorStage& config,
                        Rng& rng) {
  const double fb = rng.uniform(1 - config.brightness, 1 + config.brightness);
  const double fc = rng.uniform(1 - config.contrast, 1 + config.contrast);
  const double fs = rng.uniform(1 - config.saturation, 1 + config.saturation);
  const double dh = rng.uniform(-config.hue_degrees, config.hue_degrees);
  if (fb == 1.0 && fc == 1.0 && fs == 1.0 && dh == 0.0) return img;

  RasterImage out = img;
  const bool hsv_pass = fs != 1.0 || dh != 0.0;
  for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
    double ch[3];
    for (int c = 0; c < 3; ++c) {
      double v = out.pixels[i + c];
      v = (v - 128.0) * fc + 128.0;   // contrast around mid-gray
      v = v * fb;                      // brightness
      ch[c] = std::clamp(v, 0.0, 255.0);
    }
    if (hsv_pass) {
      double hh, ss, vv;
      rgb_to_hsv(ch[0] / 255, ch[1] / 255, ch[2] / 255, hh, ss, vv);
      hh += dh;
      ss = std::clamp(ss * fs, 0.0, 1.0);
      hsv_to_rgb(hh, ss, vv, ch[0], ch[1], ch[2]);
      for (double& v : ch) v = std::clamp(v * 255, 0.0, 255.0);
    }
    for (int c = 0; c < 3; ++c)
      out.pixels[i + c] = static_cast<std::uint8_t>(std::lround(ch[c]));
  }
  return out;
}

namespace {

struct Tap {
  int dx, dy;
  double w;
};

RasterImage convolve(const RasterImage& img, const std::vector<Tap>& taps) {
  RasterImage out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc[3] = {0, 0, 0};
      for (const Tap& t : taps) {
        const int sx = std::clamp(x + t.dx, 0, img.width - 1);
        const int sy = std::clamp(y + t.dy, 0, img.height - 1);
        const Rgb p = img.get(sx, sy);
        for (int c = 0; c < 3; ++c) acc[c] += t.w * p[c];
      }
      out.set(x, y,
              {static_cast<std::uint8_t>(std::lround(std::clamp(acc[0], 0.0, 255.0))),
               static_cast<std::uint8_t>(std::lround(std::clamp(acc[1], 0.0, 255.0))),
               static_cast<std::uint8_t>(std::lround(std::clamp(acc[2], 0.0, 255.0)))});
    }
  return out;
}

}  // namespace

RasterImage apply_blur(const RasterImage& img, const BlurStage& config,
                       Rng& rng) {
  if (rng.bernoulli(0.5)) {
    // Gaussian, separable.
    const double sigma = rng.uniform(config.gauss_sigma_lo, config.gauss_sigma_hi);
    if (sigma <= 0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<Tap> horiz, vert;
    double total = 0;
    for (int k = -radius; k <= radius; ++k)
      total += std::exp(-0.5 * k * k / (sigma * sigma));
    for (int k = -radius; k <= radius; ++k) {
      const double wk = std::exp(-0.5 * k * k / (sigma * sigma)) / total;
      horiz.push_back({k, 0, wk});
      vert.push_back({0, k, wk});
    }
    return convolve(convolve(img, horiz), vert);
  }

  // Motion blur: a line kernel splatted bilinearly.
  int len = static_cast<int>(rng.uniform_int(config.motion_len_lo,
                                             config.motion_len_hi));
  len |= 1;  // odd so the kernel is centered
  const double angle = rng.uniform(config.motion_angle_lo,
                                   config.motion_angle_hi) *
                       std::numbers::pi / 180.0;
  const int half = len / 2;
  const int kdim = len + 2;
  std::vector<double> kernel(std::size_t(kdim) * kdim, 0.0);
  const int kc = kdim / 2;
  for (int t = -half; t <= half; ++t) {
    const double px = kc + t * std::cos(angle);
    const double py = kc + t * std::sin(angle);
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0, fy = py - y0;
    kernel[std::size_t(y0) * kdim + x0] += (1 - fx) * (1 - fy);
    kernel[std::size_t(y0) * kdim + x0 + 1] += fx * (1 - fy);
    kernel[std::size_t(y0 + 1) * kdim + x0] += (1 - fx) * fy;
    kernel[std::size_t(y0 + 1) * kdim + x0 + 1] += fx * fy;
  }
  double total = 0;
  for (double v : kernel) total += v;
  std::vector<Tap> taps;
  for (int y = 0; y < kdim; ++y)
    for (int x = 0; x < kdim; ++x)
      if (kernel[std::size_t(y) * kdim + x] > 0)
        taps.push_back({x - kc, y - kc, kernel[std::size_t(y) * kdim + x] / total});
  return convolve(img, taps);
}

// ---------------------------------------------------------------------------
// Full chain
// ---------------------------------------------------------------------------

std::pair<RasterImage, GroundTruth> augment(const RasterImage& img,
                                            const GroundTruth& gt,
                                            const AugmentConfig& config) {
  Rng tone_rng(derive_seed(config.seed, 0, "tone"));
  const auto gray = static_cast<std::uint8_t>(tone_rng.uniform_int(200, 245));
  const Rgb fill{gray, gray, gray};

  RasterImage cur = img;
  GroundTruth out = gt;
  std::optional<WarpField> field;
  std::optional<Homography> hom;

  if (config.tps.enable) {
    Rng rng(derive_seed(config.seed, 0, "tps"));
    auto [warped, f] = apply_tps(cur, config.tps, rng, fill);
    cur = std::move(warped);
    field = std::move(f);
  }
  if (config.perspective.enable) {
    Rng rng(derive_seed(config.seed, 0, "perspective"));
    auto [warped, h] = apply_perspective(cur, config.perspective.distortion,
                                         rng, fill);
    cur = std::move(warped);
    hom = h;
  }
  if (config.noise.enable) {
    Rng rng(derive_seed(config.seed, 0, "noise"));
    cur = apply_noise(cur, config.noise, rng);
  }
  if (config.color.enable) {
    Rng rng(derive_seed(config.seed, 0, "color"));
    cur = apply_color(cur, config.color, rng);
  }
  if (config.blur.enable) {
    Rng rng(derive_seed(config.seed, 0, "blur"));
    cur = apply_blur(cur, config.blur, rng);
  }

  if (field || hom) {
    const auto map_point = [&](Point2 p) {
      if (field) p = field->warp_point(p);
      if (hom) p = apply(*hom, p);
      return p;
    };
    const auto map_box = [&](const Rect& r) {
      Rect out_box{1e300, 1e300, -1e300, -1e300};
      for (const Point2& c : r.corners()) {
        const Point2 m = map_point(c);
        out_box.x0 = std::min(out_box.x0, m.x);
        out_box.y0 = std::min(out_box.y0, m.y);
        out_box.x1 = std::max(out_box.x1, m.x);
        out_box.y1 = std::max(out_box.y1, m.y);
      }
      return out_box;
    };
    for (LabelAnnotation& label : out.labels) label.box = map_box(label.box);
    for (MarkAnnotation& mark : out.marks) mark.box = map_box(mark.box);
    for (Point2& c : out.corners) c = map_point(c);
  }
  if (hom) out.applied_homography = *hom;

  return {std::move(cur), std::move(out)};
}

}  // namespace chartex
