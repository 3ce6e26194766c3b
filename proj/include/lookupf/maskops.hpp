#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "lookupf/core.hpp"
#include "lookupf/imgproc.hpp"

namespace lookupf {

struct ComponentLabeling {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> labels;  // 0 = background, else 1..component_count
  std::size_t component_count = 0;
  std::vector<std::size_t> component_areas;  // index i holds area of label i+1

  std::uint32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct SegmentParams {
  double min_area_fraction = 0.001;
  std::size_t max_segments = 8;
  int connectivity = 8;
};

inline BinaryMask binarize_mask(const ImageBuffer& gray, int threshold = 128) {
  if (gray.channels() != 1) {
    throw Error(ErrorCode::NotSingleChannel, "binarize_mask expects a single-channel image");
  }
  std::vector<std::uint8_t> bits(gray.pixels().size());
  std::transform(gray.pixels().begin(), gray.pixels().end(), bits.begin(),
                 [threshold](std::uint8_t v) { return static_cast<std::uint8_t>(v >= threshold); });
  return BinaryMask(gray.width(), gray.height(), std::move(bits));
}

namespace detail {

inline std::uint32_t uf_find(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

inline void uf_union(std::vector<std::uint32_t>& parent, std::uint32_t a, std::uint32_t b) {
  a = uf_find(parent, a);
  b = uf_find(parent, b);
  if (a == b) return;
  // smaller provisional label wins, keeping roots at first raster encounter
  if (a < b) parent[b] = a;
  else parent[a] = b;
}

}  // namespace detail

// Two-pass labeling with union-find. Final labels are numbered by the raster
// position of each component's first pixel.
inline ComponentLabeling connected_components(const BinaryMask& mask, int connectivity = 8) {
  if (connectivity != 4 && connectivity != 8) {
    throw Error(ErrorCode::InvalidParams, "connectivity must be 4 or 8");
  }
  const int w = mask.width();
  const int h = mask.height();
  ComponentLabeling out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::uint32_t> parent{0};

  auto label_at = [&](int x, int y) -> std::uint32_t {
    if (x < 0 || y < 0 || x >= w) return 0;
    return out.labels[static_cast<std::size_t>(y) * w + x];
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      std::uint32_t neigh[4];
      int n = 0;
      auto push = [&](std::uint32_t l) {
        if (l) neigh[n++] = l;
      };
      push(label_at(x - 1, y));
      push(label_at(x, y - 1));
      if (connectivity == 8) {
        push(label_at(x - 1, y - 1));
        push(label_at(x + 1, y - 1));
      }
      std::uint32_t l;
      if (n == 0) {
        l = static_cast<std::uint32_t>(parent.size());
        parent.push_back(l);
      } else {
        l = *std::min_element(neigh, neigh + n);
        for (int i = 0; i < n; ++i) detail::uf_union(parent, l, neigh[i]);
      }
      out.labels[static_cast<std::size_t>(y) * w + x] = l;
    }
  }

  std::vector<std::uint32_t> final_label(parent.size(), 0);
  std::uint32_t next = 0;
  for (auto& l : out.labels) {
    if (!l) continue;
    const std::uint32_t root = detail::uf_find(parent, l);
    if (!final_label[root]) {
      final_label[root] = ++next;
      out.component_areas.push_back(0);
    }
    l = final_label[root];
    ++out.component_areas[l - 1];
  }
  out.component_count = next;
  return out;
}

inline double forgery_proportion(const BinaryMask& mask) {
  if (mask.size() == 0) return 0.0;
  return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

// Tight bounding box of the set bits, or nullopt for an empty mask.
inline std::optional<Box> tight_bbox(const BinaryMask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return Box{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

// One segment per connected component whose area reaches
// min_area_fraction * w * h, largest first, at most max_segments.
inline std::vector<Segment> extract_segments(const ImageBuffer& img, const BinaryMask& mask,
                                             const SegmentParams& params = {}) {
  validate_pair(img, mask);
  if (params.min_area_fraction < 0.0) {
    throw Error(ErrorCode::InvalidParams, "min_area_fraction must be non-negative");
  }
  const auto cc = connected_components(mask, params.connectivity);
  const double min_area = params.min_area_fraction * static_cast<double>(mask.size());

  struct Extent {
    int x0, y0, x1, y1;
  };
  std::vector<Extent> ext(cc.component_count,
                          Extent{mask.width(), mask.height(), -1, -1});
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const auto l = cc.at(x, y);
      if (!l) continue;
      auto& e = ext[l - 1];
      e.x0 = std::min(e.x0, x);
      e.y0 = std::min(e.y0, y);
      e.x1 = std::max(e.x1, x);
      e.y1 = std::max(e.y1, y);
    }
  }

  std::vector<std::uint32_t> kept;
  for (std::uint32_t i = 0; i < cc.component_count; ++i) {
    if (static_cast<double>(cc.component_areas[i]) >= min_area) kept.push_back(i);
  }
  // stable: equal areas keep raster order
  std::stable_sort(kept.begin(), kept.end(), [&](std::uint32_t a, std::uint32_t b) {
    return cc.component_areas[a] > cc.component_areas[b];
  });
  if (kept.size() > params.max_segments) kept.resize(params.max_segments);

  std::vector<Segment> out;
  out.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto comp = kept[k];
    const auto& e = ext[comp];
    Segment seg;
    seg.box = Box{e.x0, e.y0, e.x1 - e.x0 + 1, e.y1 - e.y0 + 1};
    seg.mask_crop = BinaryMask(seg.box.w, seg.box.h);
    for (int y = 0; y < seg.box.h; ++y) {
      for (int x = 0; x < seg.box.w; ++x) {
        if (cc.at(seg.box.x + x, seg.box.y + y) == comp + 1) seg.mask_crop.set(x, y, true);
      }
    }
    seg.image_crop = crop(img, seg.box);
    seg.area = cc.component_areas[comp];
    seg.parent_id = img.id();
    seg.index = k;
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace lookupf
