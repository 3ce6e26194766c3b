#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lookupf/core.hpp"
#include "lookupf/image_io.hpp"
#include "lookupf/imgproc.hpp"
#include "lookupf/maskops.hpp"

namespace lookupf {

using TypeScores = std::array<double, 4>;  // indexed by ForgeryType

struct DetectorSuite {
  std::function<double(const ImageBuffer&)> forgery_predictor;  // score in [0,1]
  std::function<TypeScores(const ImageBuffer&)> type_predictor;
  std::function<BinaryMask(const ImageBuffer&, ForgeryType)> mask_predictor;
  double threshold = 0.5;
  bool thread_safe = true;  // false: the pipeline serializes calls
  std::string name;
};

struct ForgeryDecision {
  bool flag = false;
  double score = 0.0;
};

inline ForgeryDecision predict_forgery(const DetectorSuite& suite, const ImageBuffer& img) {
  const double s = suite.forgery_predictor(img);
  if (!std::isfinite(s)) throw Error(ErrorCode::InvariantViolation, "non-finite forgery score");
  return {s >= suite.threshold, s};
}

// First maximum wins, so ties fall to the earlier enum value.
inline ForgeryType argmax_type(const TypeScores& scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::InvariantViolation, "non-finite type score");
  }
  return static_cast<ForgeryType>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

inline ForgeryType predict_forgery_type(const DetectorSuite& suite, const ImageBuffer& img) {
  return argmax_type(suite.type_predictor(img));
}

inline BinaryMask predict_forgery_mask(const DetectorSuite& suite, const ImageBuffer& img,
                                       ForgeryType t) {
  if (!is_localized(t)) {
    throw Error(ErrorCode::UnsupportedType,
                "no forgery mask for type " + std::string(canonical_name(t)));
  }
  auto mask = suite.mask_predictor(img, t);
  validate_pair(img, mask);
  return mask;
}

// ---------------------------------------------------------------------------
// Oracle adapter: labels come from <labels_dir>/<image id>.json with keys
// forged, type, mask (mask path relative to labels_dir).

struct OracleLabel {
  bool forged = false;
  std::optional<ForgeryType> type;
  std::optional<std::filesystem::path> mask;
  bool mask_key = false;  // "mask" present, possibly null
};

inline OracleLabel read_oracle_label(const std::filesystem::path& labels_dir, const std::string& id) {
  const auto path = labels_dir / (id + ".json");
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::MissingLabel, "no sidecar " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MissingLabel, "unreadable sidecar " + path.string() + ": " + e.what());
  }
  OracleLabel label;
  if (!j.contains("forged") || !j["forged"].is_boolean()) {
    throw Error(ErrorCode::MissingLabel, "sidecar " + path.string() + " lacks boolean 'forged'");
  }
  label.forged = j["forged"].get<bool>();
  if (j.contains("type") && j["type"].is_string()) label.type = parse_forgery_type(j["type"].get<std::string>());
  if (j.contains("mask")) {
    label.mask_key = true;
    if (j["mask"].is_string()) label.mask = labels_dir / j["mask"].get<std::string>();
  }
  return label;
}

inline DetectorSuite oracle_suite(std::filesystem::path labels_dir) {
  DetectorSuite s;
  s.name = "oracle";
  s.forgery_predictor = [labels_dir](const ImageBuffer& img) {
    return read_oracle_label(labels_dir, img.id()).forged ? 1.0 : 0.0;
  };
  s.type_predictor = [labels_dir](const ImageBuffer& img) {
    const auto label = read_oracle_label(labels_dir, img.id());
    if (!label.type) throw Error(ErrorCode::MissingLabel, "sidecar for " + img.id() + " has no type");
    TypeScores scores{};
    scores[static_cast<std::size_t>(*label.type)] = 1.0;
    return scores;
  };
  s.mask_predictor = [labels_dir](const ImageBuffer& img, ForgeryType) {
    const auto label = read_oracle_label(labels_dir, img.id());
    if (!label.mask_key) throw Error(ErrorCode::MissingLabel, "sidecar for " + img.id() + " has no mask");
    // explicit null: forged but not localized, e.g. after geometric augmentation
    if (!label.mask) return BinaryMask(img.width(), img.height());
    const auto m = load_image(*label.mask);
    return binarize_mask(m.channels() == 1 ? m : to_gray(m));
  };
  return s;
}

// ---------------------------------------------------------------------------
// Classical baselines

namespace baseline {

// Window pairs whose mean-removed luminance patches (scaled to [0,1]) lie
// within RMS distance max_dist, grouped by shift vector. A shift survives
// only with at least min_pairs matches whose windows span both axes, which
// drops the one-dimensional runs that straight edges produce. A window that
// matches more than one other window sits in a repeating texture and is
// ignored. Windows with variance below 1e-3 never match.
inline BinaryMask block_match_copy_move(const ImageBuffer& img, int block = 8, int stride = 4,
                                        double max_dist = 0.02, std::size_t min_pairs = 6) {
  if (block < 2 || stride < 1 || block > std::min(img.width(), img.height()) || !(max_dist >= 0.0)) {
    throw Error(ErrorCode::InvalidParams, "bad block-matching parameters");
  }
  const Plane lum = luminance(img);
  struct Window {
    int x, y;
    std::vector<double> f;
  };
  std::vector<Window> wins;
  const std::size_t n = static_cast<std::size_t>(block) * block;
  for (int y = 0; y + block <= img.height(); y += stride)
    for (int x = 0; x + block <= img.width(); x += stride) {
      Window w{x, y, std::vector<double>(n)};
      double mean = 0.0;
      for (int j = 0; j < block; ++j)
        for (int i = 0; i < block; ++i) mean += w.f[j * block + i] = lum(x + i, y + j) / 255.0;
      mean /= n;
      double var = 0.0;
      for (auto& v : w.f) {
        v -= mean;
        var += v * v;
      }
      if (var / n < 1e-3) continue;
      wins.push_back(std::move(w));
    }

  BinaryMask out(img.width(), img.height());
  auto mark = [&](const Window& w) {
    for (int j = 0; j < block; ++j)
      for (int i = 0; i < block; ++i) out.set(w.x + i, w.y + j, true);
  };
  const double limit = max_dist * max_dist * n;
  std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, std::size_t>>> by_shift;
  std::vector<std::size_t> degree(wins.size(), 0);
  for (std::size_t a = 0; a < wins.size(); ++a)
    for (std::size_t b = a + 1; b < wins.size(); ++b) {
      if (std::abs(wins[a].x - wins[b].x) < block && std::abs(wins[a].y - wins[b].y) < block) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < n && s <= limit; ++k) {
        const double d = wins[a].f[k] - wins[b].f[k];
        s += d * d;
      }
      if (s <= limit) {
        by_shift[{wins[b].x - wins[a].x, wins[b].y - wins[a].y}].emplace_back(a, b);
        ++degree[a];
        ++degree[b];
      }
    }
  for (auto& [shift, all] : by_shift) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [a, b] : all)
      if (degree[a] == 1 && degree[b] == 1) pairs.emplace_back(a, b);
    if (pairs.size() < min_pairs) continue;
    const auto [xmin, xmax] = std::minmax_element(pairs.begin(), pairs.end(), [&](auto& p, auto& q) {
      return wins[p.first].x < wins[q.first].x;
    });
    const auto [ymin, ymax] = std::minmax_element(pairs.begin(), pairs.end(), [&](auto& p, auto& q) {
      return wins[p.first].y < wins[q.first].y;
    });
    if (wins[xmax->first].x == wins[xmin->first].x || wins[ymax->first].y == wins[ymin->first].y) continue;
    for (const auto& [a, b] : pairs) {
      mark(wins[a]);
      mark(wins[b]);
    }
  }
  return out;
}

// Spread of per-block noise level, squashed to [0,1). Residual = luminance
// minus its 3x3 box mean; noise level per 8x8 block is the median absolute
// residual. Splices from a differently processed source raise the spread.
inline double residual_forgery_score(const ImageBuffer& img, int block = 8) {
  const Plane lum = luminance(img);
  const int w = lum.width, h = lum.height;
  if (w < 3 || h < 3) return 0.0;
  std::vector<double> res(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      double s = 0.0;
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) s += lum(x + i, y + j);
      res[static_cast<std::size_t>(y) * w + x] = std::abs(lum(x, y) - s / 9.0);
    }
  std::vector<double> sigmas;
  for (int by = 1; by + block <= h - 1; by += block)
    for (int bx = 1; bx + block <= w - 1; bx += block) {
      std::vector<double> v;
      for (int y = by; y < by + block; ++y)
        for (int x = bx; x < bx + block; ++x) v.push_back(res[static_cast<std::size_t>(y) * w + x]);
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      sigmas.push_back(v[v.size() / 2]);
    }
  if (sigmas.size() < 2) return 0.0;
  double mean = 0.0;
  for (double s : sigmas) mean += s;
  mean /= sigmas.size();
  if (mean <= 1e-12) return 0.0;
  double var = 0.0;
  for (double s : sigmas) var += (s - mean) * (s - mean);
  const double cv = std::sqrt(var / sigmas.size()) / mean;
  return cv / (1.0 + cv);
}

// Concentration of saturation-weighted hue angles. A grey image recoloured
// with a single tint concentrates near 1; natural colour scenes spread out.
inline double hue_concentration(const ImageBuffer& img) {
  if (img.channels() != 3) return 0.0;
  double sx = 0.0, sy = 0.0, ssum = 0.0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double r = img.at(x, y, 0) / 255.0, g = img.at(x, y, 1) / 255.0, b = img.at(x, y, 2) / 255.0;
      const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
      const double sat = mx - mn;
      if (sat <= 1e-9) continue;
      // hue via the opponent-axis angle
      const double hue = std::atan2(std::sqrt(3.0) * (g - b), 2 * r - g - b);
      sx += sat * std::cos(hue);
      sy += sat * std::sin(hue);
      ssum += sat;
    }
  if (ssum <= 1e-9) return 0.0;
  return std::hypot(sx, sy) / ssum;
}

struct BaselineParams {
  int block = 8;
  int stride = 4;
  double max_dist = 0.02;
};

inline TypeScores type_scores(const ImageBuffer& img, const BaselineParams& p = {}) {
  TypeScores s{};
  const auto cm = block_match_copy_move(img, p.block, p.stride, p.max_dist);
  s[static_cast<std::size_t>(ForgeryType::CopyMove)] = std::min(1.0, 10.0 * forgery_proportion(cm));
  s[static_cast<std::size_t>(ForgeryType::ImageSplicing)] = residual_forgery_score(img);
  s[static_cast<std::size_t>(ForgeryType::ObjectRemoval)] = 0.1;
  s[static_cast<std::size_t>(ForgeryType::Colorization)] = hue_concentration(img);
  return s;
}

}  // namespace baseline

// Copy-move masks mark both the source and the destination windows; the
// matcher has no cue for telling them apart. Splicing masks threshold the
// local noise-level deviation.
inline DetectorSuite baseline_suite(baseline::BaselineParams params = {}) {
  DetectorSuite s;
  s.name = "baseline";
  s.forgery_predictor = [params](const ImageBuffer& img) {
    const auto t = baseline::type_scores(img, params);
    return *std::max_element(t.begin(), t.end());
  };
  s.type_predictor = [params](const ImageBuffer& img) { return baseline::type_scores(img, params); };
  s.mask_predictor = [params](const ImageBuffer& img, ForgeryType t) {
    if (t == ForgeryType::CopyMove) {
      return baseline::block_match_copy_move(img, params.block, params.stride, params.max_dist);
    }
    // splicing: blocks whose residual level departs from the image median
    const Plane lum = luminance(img);
    const int w = lum.width, h = lum.height, b = params.block;
    std::vector<double> level;
    std::vector<Box> boxes;
    for (int by = 0; by + b <= h; by += b)
      for (int bx = 0; bx + b <= w; bx += b) {
        double m = 0.0, v = 0.0;
        for (int y = by; y < by + b; ++y)
          for (int x = bx; x < bx + b; ++x) m += lum(x, y);
        m /= b * b;
        for (int y = by; y < by + b; ++y)
          for (int x = bx; x < bx + b; ++x) v += (lum(x, y) - m) * (lum(x, y) - m);
        level.push_back(std::sqrt(v / (b * b)));
        boxes.push_back({bx, by, b, b});
      }
    BinaryMask out(w, h);
    if (level.empty()) return out;
    auto sorted = level;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double med = sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (std::abs(level[i] - med) > 2.0 * std::max(med, 1.0)) {
        for (int y = 0; y < b; ++y)
          for (int x = 0; x < b; ++x) out.set(boxes[i].x + x, boxes[i].y + y, true);
      }
    }
    return out;
  };
  return s;
}

}  // namespace lookupf
