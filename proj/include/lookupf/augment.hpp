#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lookupf/core.hpp"
#include "lookupf/descriptor.hpp"
#include "lookupf/image_io.hpp"
#include "lookupf/imgproc.hpp"
#include "lookupf/parallel.hpp"
#include "lookupf/rng.hpp"

namespace lookupf {

enum class DifficultyLevel { Easy = 0, Medium = 1, Hard = 2, Nightmare = 3 };

constexpr std::string_view level_name(DifficultyLevel l) {
  switch (l) {
    case DifficultyLevel::Easy: return "easy";
    case DifficultyLevel::Medium: return "medium";
    case DifficultyLevel::Hard: return "hard";
    case DifficultyLevel::Nightmare: return "nightmare";
  }
  return "unknown";
}

inline DifficultyLevel parse_level(std::string_view s) {
  for (auto l : {DifficultyLevel::Easy, DifficultyLevel::Medium, DifficultyLevel::Hard,
                 DifficultyLevel::Nightmare}) {
    if (s == level_name(l)) return l;
  }
  throw Error(ErrorCode::InvalidParams, "unknown difficulty level '" + std::string(s) + "'");
}

enum class AugFamily { Color, Pixel, Geometric, Corruption, Weather, UiEmbed };

enum class AugKind {
  Brightness,
  Saturation,
  Grayscale,
  Contrast,
  Blur,
  JpegRecompress,
  Pixelate,
  Sharpen,
  Crop,
  Rotate,
  Flip,
  Pad,
  Aspect,
  Perspective,
  Noise,
  Dropout,
  Jigsaw,
  Fog,
  UiEmbed,
};

struct AugKindInfo {
  AugKind kind;
  std::string_view name;
  AugFamily family;
  double min_amount;
  double max_amount;
  double default_amount;
};

// amount semantics per kind: brightness/saturation/contrast factor, blur and
// noise sigma, JPEG quality, pixelate block, sharpen gain, crop kept fraction,
// rotate degrees, pad fraction per side, aspect width ratio, perspective
// corner jitter fraction, dropout probability, jigsaw grid, fog strength, UI
// content scale.
inline constexpr std::array<AugKindInfo, 19> kAugKinds = {{
    {AugKind::Brightness, "brightness", AugFamily::Color, 0.0, 4.0, 1.3},
    {AugKind::Saturation, "saturation", AugFamily::Color, 0.0, 4.0, 1.5},
    {AugKind::Grayscale, "grayscale", AugFamily::Color, 0.0, 1.0, 1.0},
    {AugKind::Contrast, "contrast", AugFamily::Color, 0.0, 4.0, 1.3},
    {AugKind::Blur, "blur", AugFamily::Pixel, 0.0, 20.0, 1.5},
    {AugKind::JpegRecompress, "jpeg", AugFamily::Pixel, 1.0, 100.0, 50.0},
    {AugKind::Pixelate, "pixelate", AugFamily::Pixel, 1.0, 64.0, 4.0},
    {AugKind::Sharpen, "sharpen", AugFamily::Pixel, 0.0, 5.0, 1.0},
    {AugKind::Crop, "crop", AugFamily::Geometric, 0.05, 1.0, 0.8},
    {AugKind::Rotate, "rotate", AugFamily::Geometric, -180.0, 180.0, 10.0},
    {AugKind::Flip, "flip", AugFamily::Geometric, 0.0, 1.0, 1.0},
    {AugKind::Pad, "pad", AugFamily::Geometric, 0.0, 1.0, 0.1},
    {AugKind::Aspect, "aspect", AugFamily::Geometric, 0.2, 5.0, 1.3},
    {AugKind::Perspective, "perspective", AugFamily::Geometric, 0.0, 0.45, 0.1},
    {AugKind::Noise, "noise", AugFamily::Corruption, 0.0, 128.0, 10.0},
    {AugKind::Dropout, "dropout", AugFamily::Corruption, 0.0, 1.0, 0.05},
    {AugKind::Jigsaw, "jigsaw", AugFamily::Corruption, 1.0, 16.0, 3.0},
    {AugKind::Fog, "fog", AugFamily::Weather, 0.0, 1.0, 0.5},
    {AugKind::UiEmbed, "ui-embed", AugFamily::UiEmbed, 0.2, 1.0, 0.8},
}};

inline const AugKindInfo& aug_info(AugKind k) { return kAugKinds[static_cast<std::size_t>(k)]; }

struct AugOp {
  AugKind kind;
  double amount;

  friend bool operator==(const AugOp&, const AugOp&) = default;
};

struct AugmentationPlan {
  DifficultyLevel level = DifficultyLevel::Easy;
  std::vector<AugOp> ops;
  std::uint64_t seed = 0;

  void validate() const {
    for (const auto& op : ops) {
      const auto& info = aug_info(op.kind);
      if (!std::isfinite(op.amount) || op.amount < info.min_amount || op.amount > info.max_amount) {
        throw Error(ErrorCode::InvalidParams, std::string(info.name) + " amount out of range");
      }
    }
  }

  std::string describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      os << (i ? "," : "") << aug_info(ops[i].kind).name << ":" << ops[i].amount;
    }
    return os.str();
  }
};

// "brightness:1.3,flip,jpeg:40" -> ops; a missing amount takes the default.
inline std::vector<AugOp> parse_ops(std::string_view text) {
  std::vector<AugOp> ops;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto token = text.substr(pos, end - pos);
    pos = end + 1;
    if (token.empty()) continue;
    const auto colon = token.find(':');
    const auto name = token.substr(0, colon);
    const auto it = std::find_if(kAugKinds.begin(), kAugKinds.end(),
                                 [&](const AugKindInfo& i) { return i.name == name; });
    if (it == kAugKinds.end()) {
      throw Error(ErrorCode::InvalidParams, "unknown augmentation '" + std::string(name) + "'");
    }
    double amount = it->default_amount;
    if (colon != std::string_view::npos) {
      try {
        amount = std::stod(std::string(token.substr(colon + 1)));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParams, "bad amount in '" + std::string(token) + "'");
      }
    }
    ops.push_back({it->kind, amount});
  }
  return ops;
}

namespace aug {

// Working copy in floating point, interleaved like ImageBuffer.
struct Canvas {
  int w = 0, h = 0, c = 0;
  std::vector<double> v;

  explicit Canvas(const ImageBuffer& img)
      : w(img.width()), h(img.height()), c(img.channels()),
        v(img.pixels().begin(), img.pixels().end()) {}
  Canvas(int w_, int h_, int c_, double fill = 0.0)
      : w(w_), h(h_), c(c_), v(static_cast<std::size_t>(w_) * h_ * c_, fill) {}

  double& at(int x, int y, int k) { return v[(static_cast<std::size_t>(y) * w + x) * c + k]; }
  double at(int x, int y, int k) const {
    return v[(static_cast<std::size_t>(y) * w + x) * c + k];
  }

  // Bilinear sample; outside the canvas returns `fill`.
  double sample(double x, double y, int k, double fill = 0.0) const {
    if (x < -0.5 || y < -0.5 || x > w - 0.5 || y > h - 0.5) return fill;
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const double tx = x - x0, ty = y - y0;
    return (at(x0, y0, k) * (1 - tx) + at(x1, y0, k) * tx) * (1 - ty) +
           (at(x0, y1, k) * (1 - tx) + at(x1, y1, k) * tx) * ty;
  }

  ImageBuffer to_image(const std::string& id) const {
    std::vector<std::uint8_t> px(v.size());
    std::transform(v.begin(), v.end(), px.begin(), clamp_u8);
    return ImageBuffer(w, h, c, std::move(px), id);
  }
};

inline double luma_at(const Canvas& cv, int x, int y) {
  if (cv.c == 1) return cv.at(x, y, 0);
  return 0.299 * cv.at(x, y, 0) + 0.587 * cv.at(x, y, 1) + 0.114 * cv.at(x, y, 2);
}

inline Canvas gaussian_blur(const Canvas& in, double sigma) {
  if (sigma <= 0.0) return in;
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * r + 1);
  for (int i = -r; i <= r; ++i) k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  const double s = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& x : k) x /= s;
  Canvas tmp(in.w, in.h, in.c), out(in.w, in.h, in.c);
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x)
      for (int ch = 0; ch < in.c; ++ch) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * in.at(std::clamp(x + i, 0, in.w - 1), y, ch);
        tmp.at(x, y, ch) = acc;
      }
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x)
      for (int ch = 0; ch < in.c; ++ch) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(x, std::clamp(y + i, 0, in.h - 1), ch);
        out.at(x, y, ch) = acc;
      }
  return out;
}

inline Canvas resize(const Canvas& in, int w, int h) {
  Canvas out(w, h, in.c);
  const double sx = static_cast<double>(in.w) / w, sy = static_cast<double>(in.h) / h;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < in.c; ++ch)
        out.at(x, y, ch) = in.sample(std::clamp((x + 0.5) * sx - 0.5, 0.0, in.w - 1.0),
                                     std::clamp((y + 0.5) * sy - 0.5, 0.0, in.h - 1.0), ch);
  return out;
}

// Smooth value noise in [0,1] on a cells x cells lattice.
inline std::vector<double> value_noise(int w, int h, int cells, Rng& rng) {
  std::vector<double> lattice(static_cast<std::size_t>(cells + 1) * (cells + 1));
  for (auto& v : lattice) v = rng.uniform();
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const double gy = static_cast<double>(y) / h * cells;
    const int iy = std::min(static_cast<int>(gy), cells - 1);
    double ty = gy - iy;
    ty = ty * ty * (3 - 2 * ty);
    for (int x = 0; x < w; ++x) {
      const double gx = static_cast<double>(x) / w * cells;
      const int ix = std::min(static_cast<int>(gx), cells - 1);
      double tx = gx - ix;
      tx = tx * tx * (3 - 2 * tx);
      auto L = [&](int a, int b) { return lattice[static_cast<std::size_t>(b) * (cells + 1) + a]; };
      out[static_cast<std::size_t>(y) * w + x] =
          (L(ix, iy) * (1 - tx) + L(ix + 1, iy) * tx) * (1 - ty) +
          (L(ix, iy + 1) * (1 - tx) + L(ix + 1, iy + 1) * tx) * ty;
    }
  }
  return out;
}

inline Canvas apply(const Canvas& in, const AugOp& op, Rng& rng) {
  const double a = op.amount;
  switch (op.kind) {
    case AugKind::Brightness: {
      Canvas out = in;
      for (auto& v : out.v) v *= a;
      return out;
    }
    case AugKind::Saturation:
    case AugKind::Grayscale: {
      if (in.c == 1) return in;
      const double factor = op.kind == AugKind::Grayscale ? 1.0 - a : a;
      Canvas out = in;
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
          const double g = luma_at(in, x, y);
          for (int ch = 0; ch < 3; ++ch) out.at(x, y, ch) = g + (in.at(x, y, ch) - g) * factor;
        }
      return out;
    }
    case AugKind::Contrast: {
      Canvas out = in;
      const double mean = std::accumulate(in.v.begin(), in.v.end(), 0.0) / in.v.size();
      for (auto& v : out.v) v = mean + (v - mean) * a;
      return out;
    }
    case AugKind::Blur:
      return gaussian_blur(in, a);
    case AugKind::JpegRecompress: {
      const auto bytes = encode_jpeg(in.to_image({}), static_cast<int>(std::lround(a)));
      return Canvas(decode_image(bytes, {}));
    }
    case AugKind::Pixelate: {
      const int b = std::max(1, static_cast<int>(std::lround(a)));
      Canvas out = in;
      for (int by = 0; by < in.h; by += b)
        for (int bx = 0; bx < in.w; bx += b)
          for (int ch = 0; ch < in.c; ++ch) {
            const int x1 = std::min(bx + b, in.w), y1 = std::min(by + b, in.h);
            double s = 0.0;
            for (int y = by; y < y1; ++y)
              for (int x = bx; x < x1; ++x) s += in.at(x, y, ch);
            s /= (x1 - bx) * (y1 - by);
            for (int y = by; y < y1; ++y)
              for (int x = bx; x < x1; ++x) out.at(x, y, ch) = s;
          }
      return out;
    }
    case AugKind::Sharpen: {
      const Canvas blurred = gaussian_blur(in, 1.0);
      Canvas out = in;
      for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += a * (in.v[i] - blurred.v[i]);
      return out;
    }
    case AugKind::Crop: {
      const int cw = std::max(1, static_cast<int>(std::lround(in.w * a)));
      const int chh = std::max(1, static_cast<int>(std::lround(in.h * a)));
      const int ox = rng.uniform_int(0, in.w - cw), oy = rng.uniform_int(0, in.h - chh);
      Canvas out(cw, chh, in.c);
      for (int y = 0; y < chh; ++y)
        for (int x = 0; x < cw; ++x)
          for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = in.at(ox + x, oy + y, ch);
      return out;
    }
    case AugKind::Rotate: {
      const double t = a * std::numbers::pi / 180.0;
      const double cs = std::cos(t), sn = std::sin(t);
      const double cx = (in.w - 1) / 2.0, cy = (in.h - 1) / 2.0;
      Canvas out(in.w, in.h, in.c);
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
          const double dx = x - cx, dy = y - cy;
          const double sx = cs * dx + sn * dy + cx, sy = -sn * dx + cs * dy + cy;
          for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = in.sample(sx, sy, ch);
        }
      return out;
    }
    case AugKind::Flip: {
      if (a < 0.5) return in;
      Canvas out(in.w, in.h, in.c);
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x)
          for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = in.at(in.w - 1 - x, y, ch);
      return out;
    }
    case AugKind::Pad: {
      const int px = static_cast<int>(std::lround(in.w * a));
      const int py = static_cast<int>(std::lround(in.h * a));
      std::array<double, 3> color{};
      for (auto& v : color) v = rng.uniform_int(0, 255);
      Canvas out(in.w + 2 * px, in.h + 2 * py, in.c);
      for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x)
          for (int ch = 0; ch < in.c; ++ch) {
            const int sx = x - px, sy = y - py;
            out.at(x, y, ch) = (sx >= 0 && sy >= 0 && sx < in.w && sy < in.h) ? in.at(sx, sy, ch)
                                                                              : color[ch];
          }
      return out;
    }
    case AugKind::Aspect:
      return resize(in, std::max(1, static_cast<int>(std::lround(in.w * a))), in.h);
    case AugKind::Perspective: {
      // Destination corners jittered inward; map output pixels back through
      // the inverse homography.
      const double W = in.w - 1.0, H = in.h - 1.0;
      const std::array<std::array<double, 2>, 4> src{{{0, 0}, {W, 0}, {W, H}, {0, H}}};
      std::array<std::array<double, 2>, 4> dst{};
      const std::array<std::array<double, 2>, 4> inward{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
      for (int i = 0; i < 4; ++i) {
        dst[i][0] = src[i][0] + inward[i][0] * rng.uniform() * a * in.w;
        dst[i][1] = src[i][1] + inward[i][1] * rng.uniform() * a * in.h;
      }
      // Homography mapping dst -> src.
      Eigen::Matrix<double, 8, 8> m;
      Eigen::Matrix<double, 8, 1> rhs;
      for (int i = 0; i < 4; ++i) {
        const double x = dst[i][0], y = dst[i][1], u = src[i][0], v = src[i][1];
        m.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        m.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        rhs(2 * i) = u;
        rhs(2 * i + 1) = v;
      }
      const Eigen::Matrix<double, 8, 1> hvec = m.fullPivLu().solve(rhs);
      Canvas out(in.w, in.h, in.c);
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
          const double den = hvec(6) * x + hvec(7) * y + 1.0;
          const double sx = (hvec(0) * x + hvec(1) * y + hvec(2)) / den;
          const double sy = (hvec(3) * x + hvec(4) * y + hvec(5)) / den;
          for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = in.sample(sx, sy, ch);
        }
      return out;
    }
    case AugKind::Noise: {
      Canvas out = in;
      for (auto& v : out.v) v += a * rng.normal();
      return out;
    }
    case AugKind::Dropout: {
      Canvas out = in;
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x)
          if (rng.bernoulli(a))
            for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = 0.0;
      return out;
    }
    case AugKind::Jigsaw: {
      const int g = std::max(1, static_cast<int>(std::lround(a)));
      std::vector<int> perm(static_cast<std::size_t>(g) * g);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.next() % i)]);
      }
      const int tw = in.w / g, th = in.h / g;
      Canvas out = in;
      if (tw < 1 || th < 1) return out;
      for (int t = 0; t < g * g; ++t) {
        const int dx = (t % g) * tw, dy = (t / g) * th;
        const int sx = (perm[t] % g) * tw, sy = (perm[t] / g) * th;
        for (int y = 0; y < th; ++y)
          for (int x = 0; x < tw; ++x)
            for (int ch = 0; ch < in.c; ++ch) out.at(dx + x, dy + y, ch) = in.at(sx + x, sy + y, ch);
      }
      return out;
    }
    case AugKind::Fog: {
      const auto field = value_noise(in.w, in.h, 4, rng);
      Canvas out = in;
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
          const double t = a * (0.5 + 0.5 * field[static_cast<std::size_t>(y) * in.w + x]);
          for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = in.at(x, y, ch) * (1 - t) + 225.0 * t;
        }
      return out;
    }
    case AugKind::UiEmbed: {
      // Generic app frame: header bar, footer with button blocks, light
      // margins; the image is scaled into the content area.
      Canvas out(in.w, in.h, in.c, 245.0);
      const int header = std::max(1, in.h * 12 / 100), footer = std::max(1, in.h * 10 / 100);
      const int area_w = in.w - 4, area_h = in.h - header - footer - 4;
      for (int y = 0; y < header; ++y)
        for (int x = 0; x < in.w; ++x)
          for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = in.c == 3 ? (ch == 2 ? 160.0 : 60.0) : 80.0;
      for (int b = 0; b < 4; ++b) {
        const int bx0 = in.w * (2 * b + 1) / 9, bw = std::max(1, in.w / 12);
        for (int y = in.h - footer + footer / 4; y < in.h - footer / 4; ++y)
          for (int x = bx0; x < std::min(in.w, bx0 + bw); ++x)
            for (int ch = 0; ch < in.c; ++ch) out.at(x, y, ch) = 120.0;
      }
      if (area_w < 1 || area_h < 1) return out;
      const double fit = std::min(static_cast<double>(area_w) / in.w, static_cast<double>(area_h) / in.h) * a;
      const int cw = std::max(1, static_cast<int>(in.w * fit)), chh = std::max(1, static_cast<int>(in.h * fit));
      const Canvas content = resize(in, cw, chh);
      const int ox = (in.w - cw) / 2, oy = header + 2 + (area_h - chh) / 2;
      for (int y = 0; y < chh; ++y)
        for (int x = 0; x < cw; ++x)
          for (int ch = 0; ch < in.c; ++ch) out.at(ox + x, oy + y, ch) = content.at(x, y, ch);
      return out;
    }
  }
  return in;
}

}  // namespace aug

// Applies plan.ops in order; all randomness comes from plan.seed.
inline ImageBuffer augment_image(const ImageBuffer& img, const AugmentationPlan& plan) {
  plan.validate();
  if (plan.ops.empty()) return img;
  Rng rng(plan.seed);
  aug::Canvas cv(img);
  for (const auto& op : plan.ops) {
    cv = aug::apply(cv, op, rng);
    // quantize between ops as a real pipeline of 8-bit tools would
    for (auto& v : cv.v) v = clamp_u8(v);
  }
  return cv.to_image(img.id());
}

// Operation pools per level; random_plan draws from these. Grouped by the
// mean GIST drift each op causes on synthetic scenes, not by how mild the
// edit looks: a mirror flip rearranges the spatial layout GIST encodes, while
// a grayscale conversion barely moves it.
inline std::vector<AugOp> level_pool(DifficultyLevel level) {
  switch (level) {
    case DifficultyLevel::Easy:
      return {{AugKind::Brightness, 1.15}, {AugKind::Contrast, 1.15}, {AugKind::Saturation, 1.3},
              {AugKind::JpegRecompress, 85.0}, {AugKind::Grayscale, 1.0}, {AugKind::Aspect, 1.5}};
    case DifficultyLevel::Medium:
      return {{AugKind::JpegRecompress, 40.0}, {AugKind::Fog, 0.4}, {AugKind::Sharpen, 1.5},
              {AugKind::Pixelate, 3.0}, {AugKind::Blur, 1.5}, {AugKind::Fog, 0.8}};
    case DifficultyLevel::Hard:
      return {{AugKind::Noise, 20.0}, {AugKind::Crop, 0.85}, {AugKind::Pad, 0.15},
              {AugKind::Perspective, 0.12}, {AugKind::Rotate, 15.0}};
    case DifficultyLevel::Nightmare:
      return {{AugKind::Flip, 1.0}, {AugKind::Jigsaw, 3.0}, {AugKind::Dropout, 0.3},
              {AugKind::UiEmbed, 0.6}, {AugKind::Crop, 0.5}, {AugKind::Noise, 45.0}};
  }
  return {};
}

inline AugmentationPlan random_plan(DifficultyLevel level, std::uint64_t seed, int max_ops = 3) {
  Rng rng(splitmix64(seed ^ 0xa5a5a5a5ULL));
  auto pool = level_pool(level);
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[static_cast<std::size_t>(rng.next() % i)]);
  }
  const int n = rng.uniform_int(1, std::min<int>(max_ops, static_cast<int>(pool.size())));
  AugmentationPlan plan;
  plan.level = level;
  plan.ops.assign(pool.begin(), pool.begin() + n);
  plan.seed = seed;
  return plan;
}

struct Calibration {
  std::vector<double> mean_drift;        // per input plan
  std::vector<DifficultyLevel> levels;   // per input plan
};

// Mean descriptor drift of each plan over the corpus, then a quartile split
// of the plans ranked by drift. Rank r of n gets level floor(4r/n), so a
// single plan is Easy.
inline Calibration calibrate_difficulty(const std::vector<ImageBuffer>& corpus,
                                        const std::vector<AugmentationPlan>& plans,
                                        const Extractor& extractor, unsigned threads = 1) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "calibration corpus is empty");
  std::vector<Descriptor> base(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) { base[i] = extractor(corpus[i]); });

  Calibration cal;
  cal.mean_drift.assign(plans.size(), 0.0);
  std::vector<double> drift(plans.size() * corpus.size());
  parallel_for(drift.size(), threads, [&](std::size_t job) {
    const std::size_t p = job / corpus.size(), i = job % corpus.size();
    drift[job] = descriptor_drift(base[i], extractor(augment_image(corpus[i], plans[p])));
  });
  for (std::size_t p = 0; p < plans.size(); ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) s += drift[p * corpus.size() + i];
    cal.mean_drift[p] = s / corpus.size();
  }

  std::vector<std::size_t> order(plans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cal.mean_drift[a] < cal.mean_drift[b]; });
  cal.levels.assign(plans.size(), DifficultyLevel::Easy);
  for (std::size_t r = 0; r < order.size(); ++r) {
    cal.levels[order[r]] = static_cast<DifficultyLevel>(4 * r / order.size());
  }
  return cal;
}

}  // namespace lookupf
