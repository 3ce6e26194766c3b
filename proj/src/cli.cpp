#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lookupf/lookupf.hpp"

namespace lookupf::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

void configure_logging() {
  static const bool done = [] {
    auto logger = spdlog::stderr_color_mt("lookupf");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("LOOKUPF_LOG")) spdlog::set_level(spdlog::level::from_str(env));
    return true;
  }();
  (void)done;
}

// Run manifest: tool version, the resolved options, the seed and CRC32
// digests of the inputs, plus per-item errors.
class Manifest {
 public:
  explicit Manifest(std::string command) { j_["tool"] = "lookupf"; j_["version"] = kVersion; j_["command"] = std::move(command); }

  void config(const std::string& key, json value) { j_["config"][key] = std::move(value); }
  void seed(std::uint64_t s) { j_["seed"] = s; }

  void input(const fs::path& p) {
    const auto bytes = read_file_bytes(p);
    j_["inputs"].push_back({{"path", p.generic_string()},
                            {"bytes", bytes.size()},
                            {"crc32", fmt::format("{:08x}", crc32_of(bytes.data(), bytes.size()))}});
  }

  void error(const std::string& item, const std::string& message) {
    j_["errors"].push_back({{"item", item}, {"message", message}});
  }

  void write(const fs::path& path) {
    if (!j_.contains("inputs")) j_["inputs"] = json::array();
    if (!j_.contains("errors")) j_["errors"] = json::array();
    write_text_file(path, j_.dump(2) + "\n");
  }

 private:
  json j_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

fs::path manifest_next_to(const fs::path& file) {
  return file.parent_path() / (file.stem().string() + ".manifest.json");
}

GistParams gist_from(int resize_edge, int grid) {
  GistParams p;
  p.resize_edge = resize_edge;
  p.grid = grid;
  p.validate();
  return p;
}

std::vector<ImageBuffer> load_dir(const fs::path& dir) {
  std::vector<ImageBuffer> out;
  std::set<std::string> ids;
  for (const auto& p : list_images(dir)) {
    auto img = load_image(p);
    if (!ids.insert(img.id()).second) throw Error(ErrorCode::DuplicateId, "duplicate image id " + img.id());
    out.push_back(std::move(img));
  }
  return out;
}

json candidate_json(const MatchCandidate& c) {
  return {{"reference_id", c.reference_id},
          {"confidence", c.confidence},
          {"provenance", c.provenance.is_local() ? "local:" + std::to_string(*c.provenance.segment) : "global"}};
}

struct Common {
  unsigned threads = default_thread_count();
  std::uint64_t seed = 0;
};

// --------------------------------------------------------------------------

struct IndexBuildOpts {
  fs::path images, out;
  int resize_edge = 64, grid = 4;
};

void run_index_build(const IndexBuildOpts& o, const Common& c, std::ostream& out) {
  const auto params = gist_from(o.resize_edge, o.grid);
  const auto paths = list_images(o.images);
  std::vector<std::pair<std::string, Descriptor>> items(paths.size());
  parallel_for(paths.size(), c.threads, [&](std::size_t i) {
    const auto img = load_image(paths[i]);
    items[i] = {img.id(), gist_descriptor(img, params)};
  });
  const auto idx = build_index(items, params.manifest());
  if (!o.out.parent_path().empty()) ensure_dir(o.out.parent_path());
  save_index(idx, o.out);
  Manifest m("index build");
  m.config("images", o.images.generic_string());
  m.config("out", o.out.generic_string());
  m.config("descriptor", params.manifest());
  m.config("threads", c.threads);
  for (const auto& p : paths) m.input(p);
  m.write(manifest_next_to(o.out));
  out << json{{"index", o.out.generic_string()}, {"entries", idx.size()}, {"dim", idx.dim()}}.dump() << "\n";
}

struct IndexQueryOpts {
  fs::path index, image;
  std::size_t k = 10;
};

GistParams params_from_manifest(const std::string& manifest);

void run_index_query(const IndexQueryOpts& o, std::ostream& out) {
  const auto idx = load_index(o.index);
  const auto params = params_from_manifest(idx.manifest());
  const auto img = load_image(o.image);
  json res;
  res["query_id"] = img.id();
  res["candidates"] = json::array();
  for (const auto& cand : query_topk(idx, gist_descriptor(img, params), o.k)) res["candidates"].push_back(candidate_json(cand));
  out << res.dump() << "\n";
}

// Parses "gist/r64/s4/o8,8,8,8/g4/e1e-06"; anything else is rejected since
// query descriptors must come from the same extractor as the index.
GistParams params_from_manifest(const std::string& manifest) {
  GistParams p;
  if (manifest.rfind("gist/", 0) != 0) {
    throw Error(ErrorCode::InvalidParams, "index was not built with the GIST extractor ('" + manifest + "')");
  }
  std::stringstream ss(manifest.substr(5));
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (part.empty()) continue;
    const char key = part[0];
    const std::string val = part.substr(1);
    try {
      if (key == 'r') p.resize_edge = std::stoi(val);
      else if (key == 's') p.scales = std::stoi(val);
      else if (key == 'g') p.grid = std::stoi(val);
      else if (key == 'e') p.epsilon = std::stod(val);
      else if (key == 'o') {
        p.orientations_per_scale.clear();
        std::stringstream os(val);
        std::string n;
        while (std::getline(os, n, ',')) p.orientations_per_scale.push_back(std::stoi(n));
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedFile, "bad descriptor manifest '" + manifest + "'");
    }
  }
  p.validate();
  if (p.manifest() != manifest) throw Error(ErrorCode::MalformedFile, "bad descriptor manifest '" + manifest + "'");
  return p;
}

// --------------------------------------------------------------------------

struct VerifyOpts {
  fs::path index, images, labels, out;
  std::string detector = "oracle";
  std::size_t topk_global = 10, topk_local = 5, max_segments = 8;
  double min_area_fraction = 0.001;
  bool global_only = false;
};

void run_verify(const VerifyOpts& o, const Common& c, std::ostream& out, std::ostream& err) {
  const auto idx = load_index(o.index);
  const auto params = params_from_manifest(idx.manifest());
  DetectorSuite suite;
  if (o.detector == "oracle") {
    if (o.labels.empty()) throw Error(ErrorCode::InvalidParams, "--labels is required with --detector oracle");
    suite = oracle_suite(o.labels);
  } else if (o.detector == "baseline") {
    suite = baseline_suite();
  } else {
    throw Error(ErrorCode::InvalidParams, "unknown detector '" + o.detector + "'");
  }
  PipelineConfig cfg;
  cfg.topk_global = o.topk_global;
  cfg.topk_local = o.topk_local;
  cfg.segments.max_segments = o.max_segments;
  cfg.segments.min_area_fraction = o.min_area_fraction;
  cfg.global_only = o.global_only;
  const Pipeline pipeline(cfg, suite, gist_extractor(params), idx);

  const auto paths = list_images(o.images);
  std::vector<std::string> ids;
  std::vector<std::function<ImageBuffer()>> loaders;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    const auto id = p.stem().string();
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, "duplicate image id " + id);
    ids.push_back(id);
    loaders.push_back([p] { return load_image(p); });
  }
  const auto items = pipeline.verify_batch(loaders, ids, c.threads);

  ensure_dir(o.out / "reports");
  ensure_dir(o.out / "masks");
  Manifest m("verify");
  m.config("index", o.index.generic_string());
  m.config("images", o.images.generic_string());
  m.config("labels", o.labels.generic_string());
  m.config("detector", o.detector);
  m.config("topk_global", o.topk_global);
  m.config("topk_local", o.topk_local);
  m.config("max_segments", o.max_segments);
  m.config("min_area_fraction", o.min_area_fraction);
  m.config("global_only", o.global_only);
  m.config("threads", c.threads);
  m.input(o.index);
  for (const auto& p : paths) m.input(p);

  PredictionRun run;
  std::size_t authentic = 0, forged = 0, failed = 0;
  for (const auto& item : items) {
    if (!item.report) {
      ++failed;
      m.error(item.query_id, item.error);
      spdlog::error("{}: {}", item.query_id, item.error);
      continue;
    }
    const auto& rep = *item.report;
    json j;
    j["query_id"] = rep.query_id();
    j["authentic"] = rep.is_authentic();
    j["forgery_type"] = rep.forgery_type() ? json(std::string(canonical_name(*rep.forgery_type()))) : json(nullptr);
    j["mask"] = nullptr;
    if (rep.forgery_mask()) {
      save_png(*rep.forgery_mask(), o.out / "masks" / (rep.query_id() + ".png"));
      j["mask"] = "masks/" + rep.query_id() + ".png";
    }
    j["candidates"] = json::array();
    for (const auto& cand : rep.candidates()) {
      j["candidates"].push_back(candidate_json(cand));
      run.rows.push_back({rep.query_id(), cand.reference_id, cand.confidence});
    }
    write_text_file(o.out / "reports" / (rep.query_id() + ".json"), j.dump(2) + "\n");
    (rep.is_authentic() ? authentic : forged)++;
  }
  write_text_file(o.out / "predictions.csv", predictions_csv(run));
  m.write(o.out / "manifest.json");
  err << fmt::format("verified {} images: {} forged, {} authentic, {} failed\n", items.size(), forged, authentic, failed);
  out << json{{"queries", items.size()},
              {"forged", forged},
              {"authentic", authentic},
              {"failed", failed},
              {"predictions", (o.out / "predictions.csv").generic_string()}}
             .dump()
      << "\n";
}

// --------------------------------------------------------------------------

struct EvalOpts {
  fs::path predictions, gt, proportions, out;
  std::vector<std::size_t> ranks{1, 10};
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void run_eval(const EvalOpts& o, std::ostream& out) {
  const auto run = read_predictions_csv(o.predictions);
  const auto gt = read_ground_truth_csv(o.gt);
  const auto m = evaluate_retrieval(run, gt, o.ranks);
  json res;
  res["micro_ap"] = m.micro_ap;
  res["recall_at_p90"] = m.recall_at_p90;
  res["threshold_at_p90"] = optional_json(m.threshold_at_p90);
  for (const auto& [k, v] : m.recall_at_rank) res["recall_at_rank"][std::to_string(k)] = v;
  res["rows"] = run.rows.size();
  res["positives"] = gt.positive_count();

  std::string buckets_csv;
  if (!o.proportions.empty()) {
    const auto buckets = proportion_buckets(run, gt, read_proportions_csv(o.proportions));
    buckets_csv = "bucket,lower,upper,queries,positives,micro_ap\n";
    res["buckets"] = json::array();
    for (const auto& b : buckets) {
      res["buckets"].push_back({{"bucket", b.index},
                                {"lower", b.lower},
                                {"upper", b.upper},
                                {"queries", b.queries},
                                {"positives", b.positives},
                                {"micro_ap", optional_json(b.micro_ap)}});
      buckets_csv += fmt::format("{},{},{},{},{},{}\n", b.index, format_double(b.lower), format_double(b.upper),
                                 b.queries, b.positives, b.micro_ap ? format_double(*b.micro_ap) : "");
    }
  }
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text_file(o.out / "report.json", res.dump(2) + "\n");
    if (!buckets_csv.empty()) write_text_file(o.out / "buckets.csv", buckets_csv);
    Manifest man("eval");
    man.config("predictions", o.predictions.generic_string());
    man.config("gt", o.gt.generic_string());
    man.config("proportions", o.proportions.generic_string());
    man.input(o.predictions);
    man.input(o.gt);
    if (!o.proportions.empty()) man.input(o.proportions);
    man.write(o.out / "manifest.json");
  }
  out << res.dump() << "\n";
}

// --------------------------------------------------------------------------

struct GenOpts {
  fs::path image, target, donor, out;
  int feather = 2;
};

void write_forgery(const ForgeryResult& res, const ForgeryRecipe& recipe, const fs::path& dir,
                   ForgeryType type, Manifest& m, std::ostream& out) {
  ensure_dir(dir);
  const std::string stem = res.forged.id();
  save_png(res.forged, dir / (stem + ".png"));
  save_png(res.mask, dir / (stem + "_mask.png"));
  const auto bb = *tight_bbox(res.mask);
  json ann;
  ann["forged"] = true;
  ann["type"] = std::string(canonical_name(type));
  ann["mask"] = stem + "_mask.png";
  ann["bbox"] = {bb.x, bb.y, bb.w, bb.h};
  ann["proportion"] = forgery_proportion(res.mask);
  ann["originals"] = res.originals;
  ann["placement"] = {recipe.dx, recipe.dy};
  ann["scale"] = recipe.scale;
  ann["alpha"] = recipe.alpha;
  write_text_file(dir / (stem + ".json"), ann.dump(2) + "\n");
  m.write(dir / "manifest.json");
  out << ann.dump() << "\n";
}

void run_gen_copy_move(const GenOpts& o, const Common& c, std::ostream& out) {
  const auto img = load_image(o.image);
  const auto recipe = random_recipe(RecipeKind::CopyMove, img, img, item_seed(c.seed, img.id()), o.feather);
  const auto res = generate_copy_move(img, recipe);
  Manifest m("gen copy-move");
  m.seed(c.seed);
  m.config("feather", o.feather);
  m.input(o.image);
  write_forgery(res, recipe, o.out, ForgeryType::CopyMove, m, out);
}

void run_gen_splice(const GenOpts& o, const Common& c, std::ostream& out) {
  const auto target = load_image(o.target);
  const auto donor = load_image(o.donor);
  const auto recipe = random_recipe(RecipeKind::Splicing, target, donor,
                                    item_seed(c.seed, target.id() + "+" + donor.id()), o.feather);
  const auto res = generate_splicing(target, donor, recipe);
  Manifest m("gen splice");
  m.seed(c.seed);
  m.config("feather", o.feather);
  m.input(o.target);
  m.input(o.donor);
  write_forgery(res, recipe, o.out, ForgeryType::ImageSplicing, m, out);
}

// --------------------------------------------------------------------------

struct AugmentOpts {
  fs::path image, out;
  std::string ops, level;
};

void run_augment(const AugmentOpts& o, const Common& c, std::ostream& out) {
  const auto img = load_image(o.image);
  AugmentationPlan plan;
  if (!o.ops.empty() && !o.level.empty()) throw Error(ErrorCode::InvalidParams, "give either --ops or --level");
  if (!o.level.empty()) {
    plan = random_plan(parse_level(o.level), c.seed);
  } else {
    plan.ops = parse_ops(o.ops);
    plan.seed = c.seed;
  }
  const auto res = augment_image(img, plan);
  if (!o.out.parent_path().empty()) ensure_dir(o.out.parent_path());
  save_png(res, o.out);
  Manifest m("augment");
  m.seed(c.seed);
  m.config("ops", plan.describe());
  m.config("level", std::string(level_name(plan.level)));
  m.input(o.image);
  m.write(manifest_next_to(o.out));
  out << json{{"out", o.out.generic_string()}, {"ops", plan.describe()}, {"width", res.width()}, {"height", res.height()}}.dump()
      << "\n";
}

// --------------------------------------------------------------------------

struct DedupOpts {
  fs::path images, out;
  std::optional<double> tau;
  double tau_fraction = 0.01;
};

void run_dedup(const DedupOpts& o, const Common& c, std::ostream& out) {
  const auto images = load_dir(o.images);
  const auto extractor = gist_extractor();
  double tau = 0.0;
  if (o.tau) {
    tau = *o.tau;
  } else {
    std::vector<Descriptor> desc(images.size());
    parallel_for(images.size(), c.threads, [&](std::size_t i) { desc[i] = extractor(images[i]); });
    tau = relative_tau(desc, o.tau_fraction);
  }
  const auto res = dedup_references(images, tau, extractor, c.threads);
  json j;
  j["tau"] = tau;
  j["kept"] = res.kept;
  j["removed"] = json::array();
  for (const auto& [k, r] : res.removed) j["removed"].push_back({{"kept", k}, {"removed", r}});
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text_file(o.out / "dedup.json", j.dump(2) + "\n");
    Manifest m("dedup");
    m.config("tau", tau);
    m.config("threads", c.threads);
    for (const auto& p : list_images(o.images)) m.input(p);
    m.write(o.out / "manifest.json");
  }
  out << j.dump() << "\n";
}

// --------------------------------------------------------------------------

struct SegmentOpts {
  fs::path image, mask, out;
  double min_area_fraction = 0.001;
  std::size_t max_segments = 8;
  int connectivity = 8;
};

void run_extract_segments(const SegmentOpts& o, std::ostream& out) {
  const auto img = load_image(o.image);
  const auto mimg = load_image(o.mask);
  const auto mask = binarize_mask(mimg.channels() == 1 ? mimg : to_gray(mimg));
  const auto segs = extract_segments(img, mask, {o.min_area_fraction, o.max_segments, o.connectivity});
  ensure_dir(o.out);
  json j = json::array();
  for (const auto& s : segs) {
    const std::string stem = fmt::format("{}_s{}", img.id(), s.index);
    save_png(s.image_crop, o.out / (stem + ".png"));
    save_png(s.mask_crop, o.out / (stem + "_mask.png"));
    j.push_back({{"index", s.index}, {"file", stem + ".png"}, {"box", {s.box.x, s.box.y, s.box.w, s.box.h}}, {"area", s.area}});
  }
  write_text_file(o.out / "segments.json", j.dump(2) + "\n");
  Manifest m("extract-segments");
  m.config("min_area_fraction", o.min_area_fraction);
  m.config("max_segments", o.max_segments);
  m.config("connectivity", o.connectivity);
  m.input(o.image);
  m.input(o.mask);
  m.write(o.out / "manifest.json");
  out << json{{"parent", img.id()}, {"segments", j}}.dump() << "\n";
}

// --------------------------------------------------------------------------

struct DatasetOpts {
  fs::path out, sources;
  DatasetConfig cfg;
};

void run_dataset_emit(DatasetOpts o, const Common& c, std::ostream& out) {
  o.cfg.seed = c.seed;
  if (!o.sources.empty()) o.cfg.source_images = list_images(o.sources);
  const auto sum = emit_dataset_layout(o.out, o.cfg, c.threads);
  Manifest m("dataset emit");
  m.seed(c.seed);
  m.config("references", o.cfg.references);
  m.config("training", o.cfg.training);
  m.config("queries", o.cfg.queries);
  m.config("segments", o.cfg.segments);
  m.config("image_size", o.cfg.image_size);
  m.config("distractor_every", o.cfg.distractor_every);
  m.config("feather", o.cfg.feather);
  m.config("threads", c.threads);
  for (const auto& p : o.cfg.source_images) m.input(p);
  m.write(o.out / "manifest.json");
  out << json{{"root", o.out.generic_string()},
              {"references", sum.reference_ids.size()},
              {"queries", sum.queries.size()},
              {"augmented", sum.augmented_ids.size()},
              {"originals", sum.originals_written},
              {"segments", sum.segments_written}}
             .dump()
      << "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"lookupf: forgery identification and original-image retrieval", "lookupf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  auto add_common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    if (seeded) sub->add_option("--seed", common.seed, "master seed");
  };
  std::function<void()> action;

  auto* index = app.add_subcommand("index", "build or query a reference index");
  index->require_subcommand(1);
  IndexBuildOpts ib;
  auto* ibuild = index->add_subcommand("build", "extract GIST descriptors for a folder and save the index");
  ibuild->add_option("--images", ib.images, "reference image folder")->required()->check(CLI::ExistingDirectory);
  ibuild->add_option("--out", ib.out, "index file")->required();
  ibuild->add_option("--resize-edge", ib.resize_edge, "working resolution");
  ibuild->add_option("--grid", ib.grid, "pooling grid");
  add_common(ibuild, false);
  ibuild->callback([&] { action = [&] { run_index_build(ib, common, out); }; });

  IndexQueryOpts iq;
  auto* iquery = index->add_subcommand("query", "top-k references for one image");
  iquery->add_option("--index", iq.index)->required()->check(CLI::ExistingFile);
  iquery->add_option("--image", iq.image)->required()->check(CLI::ExistingFile);
  iquery->add_option("-k,--k", iq.k)->check(CLI::PositiveNumber);
  iquery->callback([&] { action = [&] { run_index_query(iq, out); }; });

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "run forgery identification and fact retrieval on a folder");
  verify->add_option("--index", vo.index)->required()->check(CLI::ExistingFile);
  verify->add_option("--images", vo.images)->required()->check(CLI::ExistingDirectory);
  verify->add_option("--detector", vo.detector, "oracle or baseline")->check(CLI::IsMember({"oracle", "baseline"}));
  verify->add_option("--labels", vo.labels, "sidecar folder for the oracle detector");
  verify->add_option("--out", vo.out, "output folder")->required();
  verify->add_option("--topk-global", vo.topk_global)->check(CLI::PositiveNumber);
  verify->add_option("--topk-local", vo.topk_local)->check(CLI::PositiveNumber);
  verify->add_option("--max-segments", vo.max_segments)->check(CLI::PositiveNumber);
  verify->add_option("--min-area-fraction", vo.min_area_fraction)->check(CLI::Range(0.0, 1.0));
  verify->add_flag("--global-only", vo.global_only, "skip local retrieval");
  add_common(verify, false);
  verify->callback([&] { action = [&] { run_verify(vo, common, out, err); }; });

  EvalOpts eo;
  auto* ev = app.add_subcommand("eval", "retrieval metrics for a predictions CSV");
  ev->add_option("--predictions", eo.predictions)->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", eo.gt)->required()->check(CLI::ExistingFile);
  ev->add_option("--proportions", eo.proportions)->check(CLI::ExistingFile);
  ev->add_option("--ranks", eo.ranks)->delimiter(',');
  ev->add_option("--out", eo.out, "optional report folder");
  ev->callback([&] { action = [&] { run_eval(eo, out); }; });

  auto* gen = app.add_subcommand("gen", "synthesize one forgery");
  gen->require_subcommand(1);
  GenOpts go;
  auto* gcm = gen->add_subcommand("copy-move", "copy an object within one image");
  gcm->add_option("--image", go.image)->required()->check(CLI::ExistingFile);
  gcm->add_option("--out", go.out)->required();
  gcm->add_option("--feather", go.feather)->check(CLI::NonNegativeNumber);
  add_common(gcm, true);
  gcm->callback([&] { action = [&] { run_gen_copy_move(go, common, out); }; });
  auto* gsp = gen->add_subcommand("splice", "paste an object from a donor image");
  gsp->add_option("--target", go.target)->required()->check(CLI::ExistingFile);
  gsp->add_option("--donor", go.donor)->required()->check(CLI::ExistingFile);
  gsp->add_option("--out", go.out)->required();
  gsp->add_option("--feather", go.feather)->check(CLI::NonNegativeNumber);
  add_common(gsp, true);
  gsp->callback([&] { action = [&] { run_gen_splice(go, common, out); }; });

  AugmentOpts ao;
  auto* augment = app.add_subcommand("augment", "apply an augmentation plan to one image");
  augment->add_option("--image", ao.image)->required()->check(CLI::ExistingFile);
  augment->add_option("--out", ao.out, "output PNG")->required();
  augment->add_option("--ops", ao.ops, "e.g. brightness:1.3,flip,jpeg:40");
  augment->add_option("--level", ao.level, "random plan from a level")->check(CLI::IsMember({"easy", "medium", "hard", "nightmare"}));
  add_common(augment, true);
  augment->callback([&] { action = [&] { run_augment(ao, common, out); }; });

  DedupOpts dd;
  auto* dedup = app.add_subcommand("dedup", "find near-duplicate references");
  dedup->add_option("--images", dd.images)->required()->check(CLI::ExistingDirectory);
  dedup->add_option("--tau", dd.tau, "absolute distance threshold")->check(CLI::NonNegativeNumber);
  dedup->add_option("--tau-fraction", dd.tau_fraction, "threshold as a fraction of the mean pair distance")
      ->check(CLI::NonNegativeNumber);
  dedup->add_option("--out", dd.out, "optional report folder");
  add_common(dedup, false);
  dedup->callback([&] { action = [&] { run_dedup(dd, common, out); }; });

  SegmentOpts so;
  auto* seg = app.add_subcommand("extract-segments", "cut connected forged regions out of an image");
  seg->add_option("--image", so.image)->required()->check(CLI::ExistingFile);
  seg->add_option("--mask", so.mask)->required()->check(CLI::ExistingFile);
  seg->add_option("--out", so.out)->required();
  seg->add_option("--min-area-fraction", so.min_area_fraction)->check(CLI::Range(0.0, 1.0));
  seg->add_option("--max-segments", so.max_segments)->check(CLI::PositiveNumber);
  seg->add_option("--connectivity", so.connectivity)->check(CLI::IsMember({4, 8}));
  seg->callback([&] { action = [&] { run_extract_segments(so, out); }; });

  auto* dataset = app.add_subcommand("dataset", "dataset construction");
  dataset->require_subcommand(1);
  DatasetOpts ds;
  auto* emit = dataset->add_subcommand("emit", "write the seven-folder dataset layout");
  emit->add_option("--out", ds.out)->required();
  emit->add_option("--sources", ds.sources, "folder of source images used before synthetic scenes")
      ->check(CLI::ExistingDirectory);
  emit->add_option("--references", ds.cfg.references);
  emit->add_option("--training", ds.cfg.training);
  emit->add_option("--queries", ds.cfg.queries);
  emit->add_option("--segments", ds.cfg.segments);
  emit->add_option("--image-size", ds.cfg.image_size)->check(CLI::Range(16, 4096));
  emit->add_option("--distractor-every", ds.cfg.distractor_every);
  emit->add_option("--feather", ds.cfg.feather)->check(CLI::NonNegativeNumber);
  emit->add_flag("!--no-augmented", ds.cfg.augmented, "skip AugmentedQuery");
  add_common(emit, true);
  emit->callback([&] { action = [&] { run_dataset_emit(ds, common, out); }; });

  std::vector<const char*> argv{"lookupf"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace lookupf::cli
