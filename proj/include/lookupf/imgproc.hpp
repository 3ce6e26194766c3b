#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lookupf/core.hpp"

namespace lookupf {

// Single-channel floating-point raster used by the analysis code.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double& operator()(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double operator()(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

inline std::uint8_t clamp_u8(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

// Rec. 601 luma on the 0..255 scale.
inline Plane luminance(const ImageBuffer& img) {
  Plane out(img.width(), img.height());
  const auto px = img.pixels();
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < n; ++i) out.values[i] = px[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.values[i] = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
    }
  }
  return out;
}

inline ImageBuffer to_gray(const ImageBuffer& img) {
  if (img.channels() == 1) return img;
  const Plane y = luminance(img);
  std::vector<std::uint8_t> px(y.values.size());
  std::transform(y.values.begin(), y.values.end(), px.begin(), clamp_u8);
  return ImageBuffer(img.width(), img.height(), 1, std::move(px), img.id());
}

inline ImageBuffer to_rgb(const ImageBuffer& img) {
  if (img.channels() == 3) return img;
  std::vector<std::uint8_t> px(img.pixels().size() * 3);
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    px[3 * i] = px[3 * i + 1] = px[3 * i + 2] = img.pixels()[i];
  }
  return ImageBuffer(img.width(), img.height(), 3, std::move(px), img.id());
}

namespace detail {

// Source coordinate of destination sample `d` under pixel-centre alignment.
inline double source_coord(int d, double scale) { return (d + 0.5) * scale - 0.5; }

struct Tap {
  int i0, i1;
  double t;
};

inline Tap bilinear_tap(int d, double scale, int src_len) {
  double s = source_coord(d, scale);
  s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
  const int i0 = static_cast<int>(std::floor(s));
  const int i1 = std::min(i0 + 1, src_len - 1);
  return {i0, i1, s - i0};
}

}  // namespace detail

inline Plane resize_bilinear(const Plane& src, int out_w, int out_h) {
  Plane out(out_w, out_h);
  const double sx = static_cast<double>(src.width) / out_w;
  const double sy = static_cast<double>(src.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const auto ty = detail::bilinear_tap(y, sy, src.height);
    for (int x = 0; x < out_w; ++x) {
      const auto tx = detail::bilinear_tap(x, sx, src.width);
      const double top = src(tx.i0, ty.i0) * (1.0 - tx.t) + src(tx.i1, ty.i0) * tx.t;
      const double bot = src(tx.i0, ty.i1) * (1.0 - tx.t) + src(tx.i1, ty.i1) * tx.t;
      out(x, y) = top * (1.0 - ty.t) + bot * ty.t;
    }
  }
  return out;
}

inline ImageBuffer resize_bilinear(const ImageBuffer& src, int out_w, int out_h) {
  const int c = src.channels();
  std::vector<std::uint8_t> px(static_cast<std::size_t>(out_w) * out_h * c);
  const double sx = static_cast<double>(src.width()) / out_w;
  const double sy = static_cast<double>(src.height()) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const auto ty = detail::bilinear_tap(y, sy, src.height());
    for (int x = 0; x < out_w; ++x) {
      const auto tx = detail::bilinear_tap(x, sx, src.width());
      for (int k = 0; k < c; ++k) {
        const double top = src.at(tx.i0, ty.i0, k) * (1.0 - tx.t) + src.at(tx.i1, ty.i0, k) * tx.t;
        const double bot = src.at(tx.i0, ty.i1, k) * (1.0 - tx.t) + src.at(tx.i1, ty.i1, k) * tx.t;
        px[(static_cast<std::size_t>(y) * out_w + x) * c + k] =
            clamp_u8(top * (1.0 - ty.t) + bot * ty.t);
      }
    }
  }
  return ImageBuffer(out_w, out_h, c, std::move(px), src.id());
}

inline ImageBuffer crop(const ImageBuffer& src, const Box& box) {
  if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 || box.x + box.w > src.width() ||
      box.y + box.h > src.height()) {
    throw Error(ErrorCode::InvalidParams, "crop box outside image bounds");
  }
  const int c = src.channels();
  std::vector<std::uint8_t> px;
  px.reserve(static_cast<std::size_t>(box.w) * box.h * c);
  const auto all = src.pixels();
  for (int y = box.y; y < box.y + box.h; ++y) {
    const auto row = all.begin() + (static_cast<std::ptrdiff_t>(y) * src.width() + box.x) * c;
    px.insert(px.end(), row, row + static_cast<std::ptrdiff_t>(box.w) * c);
  }
  return ImageBuffer(box.w, box.h, c, std::move(px), src.id());
}

}  // namespace lookupf
