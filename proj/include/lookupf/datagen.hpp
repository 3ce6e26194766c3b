#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lookupf/augment.hpp"
#include "lookupf/core.hpp"
#include "lookupf/descriptor.hpp"
#include "lookupf/image_io.hpp"
#include "lookupf/imgproc.hpp"
#include "lookupf/maskops.hpp"
#include "lookupf/parallel.hpp"
#include "lookupf/rng.hpp"

namespace lookupf {

// ---------------------------------------------------------------------------
// Procedural scenes

// Gradient background plus a handful of flat and striped shapes with mild
// sensor noise. Different seeds give clearly different layouts.
inline ImageBuffer synthesize_scene(std::uint64_t seed, int width, int height, std::string id = {}) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidParams, "scene size must be >= 1");
  Rng rng(seed);
  std::vector<double> px(static_cast<std::size_t>(width) * height * 3);
  auto put = [&](int x, int y, int c) -> double& {
    return px[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  };

  double c0[3], c1[3];
  for (int c = 0; c < 3; ++c) {
    c0[c] = rng.uniform(20, 235);
    c1[c] = rng.uniform(20, 235);
  }
  const double ga = rng.uniform(0, 2 * std::numbers::pi);
  const double gx = std::cos(ga), gy = std::sin(ga);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double t = 0.5 + 0.5 * ((static_cast<double>(x) / width - 0.5) * gx + (static_cast<double>(y) / height - 0.5) * gy);
      for (int c = 0; c < 3; ++c) put(x, y, c) = c0[c] * (1 - t) + c1[c] * t;
    }

  const int shapes = rng.uniform_int(4, 9);
  for (int s = 0; s < shapes; ++s) {
    const int kind = rng.uniform_int(0, 2);  // 0 ellipse, 1 rectangle, 2 rotated band
    const double cx = rng.uniform(0, width), cy = rng.uniform(0, height);
    const double rx = rng.uniform(0.06, 0.3) * width, ry = rng.uniform(0.06, 0.3) * height;
    const double ang = rng.uniform(0, std::numbers::pi);
    const double ca = std::cos(ang), sa = std::sin(ang);
    double col[3], col2[3];
    for (int c = 0; c < 3; ++c) {
      col[c] = rng.uniform(0, 255);
      col2[c] = rng.uniform(0, 255);
    }
    const bool striped = rng.bernoulli(0.4);
    const double freq = rng.uniform(0.08, 0.35), sang = rng.uniform(0, std::numbers::pi);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double dx = x - cx, dy = y - cy;
        const double u = ca * dx + sa * dy, v = -sa * dx + ca * dy;
        bool inside = false;
        if (kind == 0) inside = (u * u) / (rx * rx) + (v * v) / (ry * ry) <= 1.0;
        else if (kind == 1) inside = std::abs(u) <= rx && std::abs(v) <= ry;
        else inside = std::abs(v) <= 0.25 * ry;
        if (!inside) continue;
        double t = 0.0;
        if (striped) {
          t = 0.5 + 0.5 * std::sin(2 * std::numbers::pi * freq * (x * std::cos(sang) + y * std::sin(sang)));
        }
        for (int c = 0; c < 3; ++c) put(x, y, c) = col[c] * (1 - t) + col2[c] * t;
      }
  }

  std::vector<std::uint8_t> out(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) out[i] = clamp_u8(px[i] + 2.0 * rng.normal());
  return ImageBuffer(width, height, 3, std::move(out), std::move(id));
}

// Irregular blob: an ellipse whose radius is modulated by a few harmonics.
// Axis fractions are relative to the canvas; the blob is centred at (cx, cy)
// given as canvas fractions.
inline BinaryMask random_object_mask(Rng& rng, int width, int height, double min_axis,
                                     double max_axis, double cx_frac = -1, double cy_frac = -1) {
  const double ax = rng.uniform(min_axis, max_axis) * width;
  const double ay = rng.uniform(min_axis, max_axis) * height;
  const double cx = (cx_frac < 0 ? rng.uniform(0.3, 0.7) : cx_frac) * width;
  const double cy = (cy_frac < 0 ? rng.uniform(0.3, 0.7) : cy_frac) * height;
  double amp[3], phase[3];
  for (int k = 0; k < 3; ++k) {
    amp[k] = rng.uniform(0.0, 0.12);
    phase[k] = rng.uniform(0, 2 * std::numbers::pi);
  }
  BinaryMask m(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = (x - cx) / ax, dy = (y - cy) / ay;
      const double th = std::atan2(dy, dx);
      double r = 1.0;
      for (int k = 0; k < 3; ++k) r += amp[k] * std::sin((k + 2) * th + phase[k]);
      if (dx * dx + dy * dy <= r * r) m.set(x, y, true);
    }
  if (m.count() == 0) m.set(std::clamp(static_cast<int>(cx), 0, width - 1),
                            std::clamp(static_cast<int>(cy), 0, height - 1), true);
  return m;
}

// ---------------------------------------------------------------------------
// Forgery synthesis

enum class RecipeKind { CopyMove, Splicing };

struct ForgeryRecipe {
  RecipeKind kind = RecipeKind::CopyMove;
  std::string source_id;
  std::string donor_id;     // splicing only
  BinaryMask object_mask;   // on the donor (the source itself for copy-move)
  int dx = 0;               // top-left of the scaled object bbox in the target
  int dy = 0;
  double scale = 1.0;
  double alpha = 1.0;
  int feather = 0;          // Gaussian edge feathering sigma in pixels, 0 = hard edge
};

struct ForgeryResult {
  ImageBuffer forged;
  BinaryMask mask;                     // destination footprint
  std::vector<std::string> originals;  // ground-truth original ids
};

namespace detail {

inline std::vector<double> feather_weights(const BinaryMask& footprint, int sigma) {
  std::vector<double> w(footprint.bits().begin(), footprint.bits().end());
  if (sigma <= 0) return w;
  ImageBuffer as_img(footprint.width(), footprint.height(), 1,
                     std::vector<std::uint8_t>(footprint.size()));
  aug::Canvas cv(as_img);
  cv.v = w;
  const auto blurred = aug::gaussian_blur(cv, sigma);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = w[i] > 0 ? std::min(1.0, blurred.v[i]) : 0.0;
  return w;
}

inline ForgeryResult composite(const ImageBuffer& target, const ImageBuffer& donor,
                               const ForgeryRecipe& r) {
  validate_pair(donor, r.object_mask);
  if (!(r.scale > 0.0) || !std::isfinite(r.scale)) throw Error(ErrorCode::InvalidParams, "scale must be > 0");
  if (!(r.alpha > 0.0 && r.alpha <= 1.0)) throw Error(ErrorCode::InvalidParams, "alpha must be in (0,1]");
  if (r.feather < 0) throw Error(ErrorCode::InvalidParams, "feather must be >= 0");
  const auto bb = tight_bbox(r.object_mask);
  if (!bb) throw Error(ErrorCode::EmptyObjectMask, "object mask is empty");
  const int sw = std::max(1, static_cast<int>(std::lround(bb->w * r.scale)));
  const int sh = std::max(1, static_cast<int>(std::lround(bb->h * r.scale)));
  if (r.dx < 0 || r.dy < 0 || r.dx + sw > target.width() || r.dy + sh > target.height()) {
    throw Error(ErrorCode::PlacementOutOfBounds, "scaled object does not fit at placement");
  }
  const ImageBuffer src = donor.channels() == target.channels()
                              ? donor
                              : (target.channels() == 3 ? to_rgb(donor) : to_gray(donor));

  // Nearest-neighbour resampling of the object, so alpha = 1 copies samples
  // verbatim.
  BinaryMask footprint(target.width(), target.height());
  std::vector<std::pair<int, int>> source_of(footprint.size(), {-1, -1});
  for (int j = 0; j < sh; ++j) {
    const int sy = bb->y + std::min(bb->h - 1, static_cast<int>(std::floor((j + 0.5) / r.scale)));
    for (int i = 0; i < sw; ++i) {
      const int sx = bb->x + std::min(bb->w - 1, static_cast<int>(std::floor((i + 0.5) / r.scale)));
      if (!r.object_mask.at(sx, sy)) continue;
      footprint.set(r.dx + i, r.dy + j, true);
      source_of[static_cast<std::size_t>(r.dy + j) * target.width() + r.dx + i] = {sx, sy};
    }
  }
  if (footprint.count() == 0) throw Error(ErrorCode::EmptyObjectMask, "scaled object is empty");

  const auto weight = feather_weights(footprint, r.feather);
  const int ch = target.channels();
  std::vector<std::uint8_t> out(target.pixels().begin(), target.pixels().end());
  for (int y = 0; y < target.height(); ++y)
    for (int x = 0; x < target.width(); ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * target.width() + x;
      if (!footprint.at(x, y)) continue;
      const auto [sx, sy] = source_of[p];
      const double a = r.alpha * weight[p];
      for (int c = 0; c < ch; ++c) {
        const std::uint8_t obj = src.at(sx, sy, c);
        out[p * ch + c] = a >= 1.0 ? obj : clamp_u8(a * obj + (1.0 - a) * target.at(x, y, c));
      }
    }
  return {ImageBuffer(target.width(), target.height(), ch, std::move(out), target.id()),
          std::move(footprint), {}};
}

}  // namespace detail

inline ForgeryResult generate_copy_move(const ImageBuffer& img, const ForgeryRecipe& recipe) {
  if (recipe.kind != RecipeKind::CopyMove) throw Error(ErrorCode::InvalidParams, "recipe is not copy-move");
  auto res = detail::composite(img, img, recipe);
  res.originals = {recipe.source_id.empty() ? img.id() : recipe.source_id};
  return res;
}

inline ForgeryResult generate_splicing(const ImageBuffer& target, const ImageBuffer& donor,
                                       const ForgeryRecipe& recipe) {
  if (recipe.kind != RecipeKind::Splicing) throw Error(ErrorCode::InvalidParams, "recipe is not splicing");
  auto res = detail::composite(target, donor, recipe);
  res.originals = {recipe.source_id.empty() ? target.id() : recipe.source_id,
                   recipe.donor_id.empty() ? donor.id() : recipe.donor_id};
  return res;
}

// Random recipe whose placement always fits. Splicing objects are large
// (most of the donor) and copy-move objects small.
inline ForgeryRecipe random_recipe(RecipeKind kind, const ImageBuffer& target, const ImageBuffer& donor,
                                   std::uint64_t seed, int feather = 2) {
  Rng rng(seed);
  ForgeryRecipe r;
  r.kind = kind;
  r.source_id = target.id();
  r.feather = feather;
  if (kind == RecipeKind::Splicing) {
    r.donor_id = donor.id();
    r.object_mask = random_object_mask(rng, donor.width(), donor.height(), 0.3, 0.42, 0.5, 0.5);
    r.scale = rng.uniform(0.65, 0.9);
  } else {
    r.object_mask = random_object_mask(rng, donor.width(), donor.height(), 0.1, 0.2);
    r.scale = rng.uniform(0.9, 1.1);
  }
  const auto bb = *tight_bbox(r.object_mask);
  int sw = std::max(1, static_cast<int>(std::lround(bb.w * r.scale)));
  int sh = std::max(1, static_cast<int>(std::lround(bb.h * r.scale)));
  if (sw > target.width() || sh > target.height()) {
    r.scale = std::min(static_cast<double>(target.width()) / bb.w, static_cast<double>(target.height()) / bb.h);
    sw = std::min(target.width(), std::max(1, static_cast<int>(std::lround(bb.w * r.scale))));
    sh = std::min(target.height(), std::max(1, static_cast<int>(std::lround(bb.h * r.scale))));
  }
  r.dx = rng.uniform_int(0, target.width() - sw);
  r.dy = rng.uniform_int(0, target.height() - sh);
  r.alpha = 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// Near-duplicate filtering

struct DedupResult {
  std::vector<std::string> kept;                            // input order
  std::vector<std::pair<std::string, std::string>> removed;  // (kept, removed), sorted
};

inline DedupResult dedup_references(const std::vector<ImageBuffer>& images, double tau,
                                    const Extractor& extractor, unsigned threads = 1) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidParams, "tau must be >= 0");
  const std::size_t n = images.size();
  std::vector<Descriptor> desc(n);
  parallel_for(n, threads, [&](std::size_t i) { desc[i] = extractor(images[i]); });

  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (descriptor_distance(desc[i], desc[j]) < tau) {
        detail::uf_union(parent, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }

  // representative = lexicographically smallest id in the cluster
  std::map<std::uint32_t, std::string> rep;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = detail::uf_find(parent, static_cast<std::uint32_t>(i));
    auto it = rep.find(root);
    if (it == rep.end() || images[i].id() < it->second) rep[root] = images[i].id();
  }
  DedupResult out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& keeper = rep[detail::uf_find(parent, static_cast<std::uint32_t>(i))];
    if (images[i].id() == keeper) out.kept.push_back(keeper);
    else out.removed.emplace_back(keeper, images[i].id());
  }
  std::sort(out.removed.begin(), out.removed.end());
  return out;
}

// tau as a fraction of the mean pairwise descriptor distance over a sample.
inline double relative_tau(const std::vector<Descriptor>& sample, double fraction) {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      sum += descriptor_distance(sample[i], sample[j]);
      ++pairs;
    }
  return pairs ? fraction * sum / static_cast<double>(pairs) : 0.0;
}

// ---------------------------------------------------------------------------
// Dataset layout

inline constexpr std::array<std::string_view, 7> kDatasetFolders = {
    "Reference", "Training", "Query", "AugmentedQuery", "Originals", "Segments", "Annotations"};

struct DatasetConfig {
  std::size_t references = 200;
  std::size_t training = 200;
  std::size_t queries = 40;
  std::size_t segments = 20;
  int image_size = 128;
  std::uint64_t seed = 0;
  std::size_t distractor_every = 10;  // every n-th query has no original in Reference; 0 = none
  bool augmented = true;
  int feather = 2;
  std::vector<std::filesystem::path> source_images;  // used before synthetic scenes when given
};

struct QueryRecord {
  std::string id;
  ForgeryType type = ForgeryType::CopyMove;
  Box bbox;
  double proportion = 0.0;
  std::vector<std::string> originals;
};

struct DatasetSummary {
  std::vector<std::string> reference_ids;
  std::vector<QueryRecord> queries;
  std::vector<std::string> augmented_ids;
  std::size_t originals_written = 0;
  std::size_t segments_written = 0;
};

inline std::string numbered_id(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, i);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

inline DatasetSummary emit_dataset_layout(const std::filesystem::path& root, const DatasetConfig& cfg,
                                          unsigned threads = 1) {
  namespace fs = std::filesystem;
  if (cfg.image_size < 16) throw Error(ErrorCode::InvalidParams, "image_size must be >= 16");
  std::error_code ec;
  for (auto f : kDatasetFolders) {
    fs::create_directories(root / f, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + (root / f).string() + ": " + ec.message());
  }
  fs::create_directories(root / "Annotations" / "masks", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create masks folder: " + ec.message());

  const int S = cfg.image_size;
  std::size_t next_source = 0;
  auto base_image = [&](std::size_t slot, const std::string& id) {
    if (slot < cfg.source_images.size()) {
      auto img = load_image(cfg.source_images[slot]);
      return resize_bilinear(img.channels() == 3 ? img : to_rgb(img), S, S).with_id(id);
    }
    return synthesize_scene(item_seed(cfg.seed, id), S, S, id);
  };

  DatasetSummary sum;
  std::vector<ImageBuffer> refs(cfg.references);
  for (std::size_t i = 0; i < cfg.references; ++i) sum.reference_ids.push_back(numbered_id('R', i));
  parallel_for(cfg.references, threads, [&](std::size_t i) {
    refs[i] = base_image(next_source + i, sum.reference_ids[i]);
    save_png(refs[i], root / "Reference" / (refs[i].id() + ".png"));
  });
  next_source += cfg.references;

  parallel_for(cfg.training, threads, [&](std::size_t i) {
    const auto img = base_image(next_source + i, numbered_id('T', i));
    save_png(img, root / "Training" / (img.id() + ".png"));
  });
  next_source += cfg.training;

  if (cfg.queries > 0 && cfg.references < 2) {
    throw Error(ErrorCode::InvalidParams, "queries need at least two reference images");
  }
  sum.queries.resize(cfg.queries);
  std::vector<BinaryMask> masks(cfg.queries);
  std::vector<ImageBuffer> forged(cfg.queries);
  parallel_for(cfg.queries, threads, [&](std::size_t i) {
    const std::string qid = numbered_id('Q', i);
    Rng rng(item_seed(cfg.seed, qid));
    const bool distractor = cfg.distractor_every && (i % cfg.distractor_every) == cfg.distractor_every - 1;
    const auto kind = (i % 2 == 0) ? RecipeKind::CopyMove : RecipeKind::Splicing;
    const std::size_t t = static_cast<std::size_t>(rng.next() % cfg.references);
    std::size_t d = static_cast<std::size_t>(rng.next() % (cfg.references - 1));
    if (d >= t) ++d;

    const ImageBuffer target = distractor ? base_image(next_source + i, numbered_id('D', i)) : refs[t];
    const ImageBuffer donor = distractor ? base_image(next_source + cfg.queries + i, numbered_id('E', i)) : refs[d];
    const auto recipe = random_recipe(kind, target, kind == RecipeKind::CopyMove ? target : donor,
                                      rng.next(), cfg.feather);
    auto res = kind == RecipeKind::CopyMove ? generate_copy_move(target, recipe)
                                            : generate_splicing(target, donor, recipe);
    auto& rec = sum.queries[i];
    rec.id = qid;
    rec.type = kind == RecipeKind::CopyMove ? ForgeryType::CopyMove : ForgeryType::ImageSplicing;
    rec.bbox = *tight_bbox(res.mask);
    rec.proportion = forgery_proportion(res.mask);
    if (!distractor) rec.originals = res.originals;
    forged[i] = res.forged.with_id(qid);
    masks[i] = std::move(res.mask);
    save_png(forged[i], root / "Query" / (qid + ".png"));
    save_png(masks[i], root / "Annotations" / "masks" / (qid + ".png"));
  });

  auto annotation = [](const QueryRecord& rec, const std::optional<std::string>& mask_path) {
    nlohmann::ordered_json j;
    j["forged"] = true;
    j["type"] = std::string(canonical_name(rec.type));
    j["mask"] = mask_path ? nlohmann::ordered_json(*mask_path) : nlohmann::ordered_json(nullptr);
    j["bbox"] = {rec.bbox.x, rec.bbox.y, rec.bbox.w, rec.bbox.h};
    j["proportion"] = rec.proportion;
    j["originals"] = rec.originals;
    return j.dump(2) + "\n";
  };
  for (const auto& rec : sum.queries) {
    write_text_file(root / "Annotations" / (rec.id + ".json"), annotation(rec, "masks/" + rec.id + ".png"));
  }

  // One augmented copy per query, levels round-robin. Augmentation may move
  // pixels, so the augmented annotation carries no mask.
  if (cfg.augmented) {
    sum.augmented_ids.resize(cfg.queries);
    parallel_for(cfg.queries, threads, [&](std::size_t i) {
      const auto& rec = sum.queries[i];
      const std::string aid = rec.id + "_aug";
      const auto plan = random_plan(static_cast<DifficultyLevel>(i % 4), item_seed(cfg.seed, aid));
      save_png(augment_image(forged[i], plan).with_id(aid), root / "AugmentedQuery" / (aid + ".png"));
      sum.augmented_ids[i] = aid;
    });
    for (std::size_t i = 0; i < cfg.queries; ++i) {
      write_text_file(root / "Annotations" / (sum.augmented_ids[i] + ".json"),
                      annotation(sum.queries[i], std::nullopt));
    }
  }

  // Originals: every reference that some query derives from.
  std::set<std::string> original_ids;
  for (const auto& rec : sum.queries) original_ids.insert(rec.originals.begin(), rec.originals.end());
  for (const auto& id : original_ids) {
    fs::copy_file(root / "Reference" / (id + ".png"), root / "Originals" / (id + ".png"),
                  fs::copy_options::overwrite_existing, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot copy original " + id + ": " + ec.message());
  }
  sum.originals_written = original_ids.size();

  // Segments: the largest forged region of the first queries.
  const std::size_t nseg = std::min(cfg.segments, cfg.queries);
  for (std::size_t i = 0; i < nseg; ++i) {
    const auto segs = extract_segments(forged[i], masks[i], SegmentParams{0.0, 1, 8});
    if (segs.empty()) continue;
    save_png(segs.front().image_crop.with_id(sum.queries[i].id + "_s0"),
             root / "Segments" / (sum.queries[i].id + "_s0.png"));
    ++sum.segments_written;
  }

  // Query and AugmentedQuery ground truth go to separate files so each folder
  // can be evaluated on its own.
  auto tables = [](const std::vector<std::pair<std::string, const QueryRecord*>>& rows) {
    std::pair<std::string, std::string> t{"query_id,reference_id\n", "query_id,proportion\n"};
    for (const auto& [qid, rec] : rows) {
      for (const auto& r : rec->originals) t.first += qid + "," + r + "\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", rec->proportion);
      t.second += qid + "," + buf + "\n";
    }
    return t;
  };
  std::vector<std::pair<std::string, const QueryRecord*>> qrows, arows;
  for (const auto& rec : sum.queries) qrows.emplace_back(rec.id, &rec);
  for (std::size_t i = 0; i < sum.augmented_ids.size(); ++i) arows.emplace_back(sum.augmented_ids[i], &sum.queries[i]);
  const auto [gt, props] = tables(qrows);
  write_text_file(root / "Annotations" / "ground_truth.csv", gt);
  write_text_file(root / "Annotations" / "proportions.csv", props);
  if (cfg.augmented) {
    const auto [agt, aprops] = tables(arows);
    write_text_file(root / "Annotations" / "augmented_ground_truth.csv", agt);
    write_text_file(root / "Annotations" / "augmented_proportions.csv", aprops);
  }

  nlohmann::ordered_json meta;
  meta["seed"] = cfg.seed;
  meta["image_size"] = cfg.image_size;
  meta["counts"] = {{"reference", cfg.references},     {"training", cfg.training},
                    {"query", cfg.queries},             {"augmented_query", sum.augmented_ids.size()},
                    {"originals", sum.originals_written}, {"segments", sum.segments_written}};
  meta["copy_move_masks"] = "destination footprint only";
  meta["augmented_ground_truth"] = "augmented queries inherit the originals of their parent query";
  meta["blending"] = "alpha compositing with Gaussian edge feathering";
  meta["feather_sigma"] = cfg.feather;
  write_text_file(root / "Annotations" / "metadata.json", meta.dump(2) + "\n");
  return sum;
}

}  // namespace lookupf
