#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "assertions.hpp"
#include "fixtures.hpp"
#include "lookupf/datagen.hpp"
#include "oracles.hpp"

namespace lookupf {
namespace {

using fixtures::throws_code;
namespace fs = std::filesystem;

ForgeryRecipe rect_recipe(RecipeKind kind, int w, int h, Box obj, int dx, int dy, double scale = 1.0) {
  ForgeryRecipe r;
  r.kind = kind;
  r.object_mask = fixtures::rect_mask(w, h, obj);
  r.dx = dx;
  r.dy = dy;
  r.scale = scale;
  r.feather = 0;
  return r;
}

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), {}};
}

TEST(CopyMove, HardEdgeCopiesPixelsVerbatim) {
  const auto img = fixtures::noise_image(64, 48, 3, 1, "src");
  const auto r = rect_recipe(RecipeKind::CopyMove, 64, 48, {4, 6, 12, 10}, 40, 30);
  const auto res = generate_copy_move(img, r);
  EXPECT_EQ(res.originals, std::vector<std::string>{"src"});
  EXPECT_EQ(res.mask.count(), 120u);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c) {
        if (res.mask.at(x, y)) EXPECT_EQ(res.forged.at(x, y, c), img.at(x - 36, y - 24, c));
        else EXPECT_EQ(res.forged.at(x, y, c), img.at(x, y, c));
      }
}

TEST(CopyMove, FeatheringStaysInsideFootprint) {
  const auto img = fixtures::noise_image(64, 64, 3, 2);
  auto r = rect_recipe(RecipeKind::CopyMove, 64, 64, {5, 5, 20, 20}, 35, 35);
  r.feather = 3;
  const auto res = generate_copy_move(img, r);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (!res.mask.at(x, y)) {
        for (int c = 0; c < 3; ++c) ASSERT_EQ(res.forged.at(x, y, c), img.at(x, y, c));
      }
  // inside, every value is a blend of target and object
  for (int y = 35; y < 55; ++y)
    for (int x = 35; x < 55; ++x)
      for (int c = 0; c < 3; ++c) {
        const int t = img.at(x, y, c), o = img.at(x - 30, y - 30, c), f = res.forged.at(x, y, c);
        EXPECT_GE(f, std::min(t, o) - 1);
        EXPECT_LE(f, std::max(t, o) + 1);
      }
}

TEST(CopyMove, ProportionIsFootprintBitCount) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto img = synthesize_scene(seed, 80, 60, "s");
    const auto res = generate_copy_move(img, random_recipe(RecipeKind::CopyMove, img, img, seed, 0));
    const std::vector<std::uint8_t> bits(res.mask.bits().begin(), res.mask.bits().end());
    EXPECT_DOUBLE_EQ(forgery_proportion(res.mask), static_cast<double>(oracle::bit_count(bits)) / (80.0 * 60.0));
    EXPECT_GT(res.mask.count(), 0u);
  }
}

TEST(CopyMove, HalfScaleQuartersTheFootprint) {
  const auto img = fixtures::noise_image(64, 64, 1, 3);
  const auto res = generate_copy_move(img, rect_recipe(RecipeKind::CopyMove, 64, 64, {0, 0, 20, 20}, 40, 40, 0.5));
  EXPECT_EQ(res.mask.count(), 100u);
  EXPECT_EQ(*tight_bbox(res.mask), (Box{40, 40, 10, 10}));
}

TEST(CopyMove, InvalidRecipes) {
  const auto img = fixtures::noise_image(32, 32, 3, 4);
  auto empty = rect_recipe(RecipeKind::CopyMove, 32, 32, {0, 0, 0, 0}, 0, 0);
  EXPECT_TRUE(throws_code([&] { generate_copy_move(img, empty); }, ErrorCode::EmptyObjectMask));
  auto off = rect_recipe(RecipeKind::CopyMove, 32, 32, {0, 0, 10, 10}, 25, 0);
  EXPECT_TRUE(throws_code([&] { generate_copy_move(img, off); }, ErrorCode::PlacementOutOfBounds));
  auto neg = rect_recipe(RecipeKind::CopyMove, 32, 32, {0, 0, 10, 10}, -1, 0);
  EXPECT_TRUE(throws_code([&] { generate_copy_move(img, neg); }, ErrorCode::PlacementOutOfBounds));
  auto wrong = rect_recipe(RecipeKind::CopyMove, 16, 16, {0, 0, 4, 4}, 0, 0);
  EXPECT_TRUE(throws_code([&] { generate_copy_move(img, wrong); }, ErrorCode::DimensionMismatch));
  auto alpha = rect_recipe(RecipeKind::CopyMove, 32, 32, {0, 0, 4, 4}, 0, 0);
  alpha.alpha = 0;
  EXPECT_TRUE(throws_code([&] { generate_copy_move(img, alpha); }, ErrorCode::InvalidParams));
  EXPECT_TRUE(throws_code([&] { generate_splicing(img, img, rect_recipe(RecipeKind::CopyMove, 32, 32, {0, 0, 4, 4}, 0, 0)); },
                          ErrorCode::InvalidParams));
}

TEST(Splicing, TwoOriginalsAndDonorPixels) {
  const auto target = fixtures::noise_image(48, 48, 3, 5, "t");
  const auto donor = fixtures::noise_image(40, 40, 1, 6, "d");
  const auto res = generate_splicing(target, donor, rect_recipe(RecipeKind::Splicing, 40, 40, {10, 10, 8, 8}, 0, 0));
  EXPECT_EQ(res.originals, (std::vector<std::string>{"t", "d"}));
  EXPECT_EQ(res.forged.channels(), 3);
  EXPECT_EQ(res.forged.at(3, 3, 0), donor.at(13, 13, 0));
  EXPECT_EQ(res.forged.at(3, 3, 2), donor.at(13, 13, 0));
  EXPECT_EQ(res.forged.at(20, 20, 1), target.at(20, 20, 1));
}

TEST(RandomRecipe, AlwaysFitsAndIsDeterministic) {
  const auto a = synthesize_scene(1, 64, 64, "a"), b = synthesize_scene(2, 64, 64, "b");
  for (std::uint64_t s = 0; s < 40; ++s) {
    for (auto kind : {RecipeKind::CopyMove, RecipeKind::Splicing}) {
      const auto r = random_recipe(kind, a, b, s);
      const auto res = kind == RecipeKind::CopyMove ? generate_copy_move(a, r) : generate_splicing(a, b, r);
      const auto again = kind == RecipeKind::CopyMove ? generate_copy_move(a, random_recipe(kind, a, b, s))
                                                      : generate_splicing(a, b, random_recipe(kind, a, b, s));
      EXPECT_EQ(res.forged, again.forged);
    }
  }
}

TEST(Dedup, ZeroTauKeepsEverything) {
  std::vector<ImageBuffer> imgs{fixtures::noise_image(16, 16, 3, 1, "a"), fixtures::noise_image(16, 16, 3, 1, "b")};
  const auto r = dedup_references(imgs, 0.0, gist_extractor());
  EXPECT_EQ(r.kept, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(r.removed.empty());
  EXPECT_THROW(dedup_references(imgs, -1, gist_extractor()), Error);
}

TEST(Dedup, PlantedDuplicatesRemoved) {
  std::vector<ImageBuffer> imgs;
  for (std::size_t i = 0; i < 50; ++i) imgs.push_back(fixtures::noise_image(32, 32, 3, 100 + i, fixtures::id("N", i)));
  // planted copies get ids that sort both before and after their source
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& src = imgs[i * 7];
    imgs.push_back(src.with_id(i % 2 ? "A" + src.id() : "Z" + src.id()));
  }
  const auto ex = gist_extractor();
  std::vector<Descriptor> sample;
  for (std::size_t i = 0; i < 10; ++i) sample.push_back(ex(imgs[i]));
  const double tau = relative_tau(sample, 0.01);
  EXPECT_GT(tau, 0.0);
  const auto r1 = dedup_references(imgs, tau, ex, 1);
  EXPECT_EQ(r1.kept.size(), 50u);
  ASSERT_EQ(r1.removed.size(), 5u);
  for (const auto& [kept, removed] : r1.removed) {
    EXPECT_LT(kept, removed);
    EXPECT_EQ(kept.substr(kept.size() - 5), removed.substr(removed.size() - 5));
  }
  EXPECT_TRUE(std::is_sorted(r1.removed.begin(), r1.removed.end()));
  const auto r8 = dedup_references(imgs, tau, ex, 8);
  EXPECT_EQ(r1.kept, r8.kept);
  EXPECT_EQ(r1.removed, r8.removed);
}

TEST(DatasetLayout, CountsAndAnnotations) {
  fixtures::TempDir dir("ds");
  DatasetConfig cfg;
  cfg.references = 12;
  cfg.training = 3;
  cfg.queries = 6;
  cfg.segments = 2;
  cfg.image_size = 48;
  cfg.distractor_every = 3;
  cfg.seed = 11;
  const auto sum = emit_dataset_layout(dir.path(), cfg, 2);
  for (auto f : kDatasetFolders) EXPECT_TRUE(fs::is_directory(dir / std::string(f))) << f;
  EXPECT_EQ(count_files(dir / "Reference"), 12u);
  EXPECT_EQ(count_files(dir / "Training"), 3u);
  EXPECT_EQ(count_files(dir / "Query"), 6u);
  EXPECT_EQ(count_files(dir / "AugmentedQuery"), 6u);
  EXPECT_EQ(count_files(dir / "Segments"), 2u);
  EXPECT_EQ(count_files(dir / "Originals"), sum.originals_written);

  for (std::size_t i = 0; i < sum.queries.size(); ++i) {
    const auto& q = sum.queries[i];
    EXPECT_EQ(q.type, i % 2 ? ForgeryType::ImageSplicing : ForgeryType::CopyMove);
    EXPECT_EQ(q.originals.size(), i % 3 == 2 ? 0u : (i % 2 ? 2u : 1u)) << q.id;
    for (const auto& o : q.originals) EXPECT_TRUE(fs::exists(dir / "Originals" / (o + ".png")));
    const auto j = nlohmann::json::parse(slurp(dir / "Annotations" / (q.id + ".json")));
    EXPECT_TRUE(j["forged"].get<bool>());
    EXPECT_EQ(j["mask"].get<std::string>(), "masks/" + q.id + ".png");
    const auto mask = binarize_mask(load_image(dir / "Annotations" / j["mask"].get<std::string>()));
    EXPECT_DOUBLE_EQ(forgery_proportion(mask), j["proportion"].get<double>());
    const auto aug = nlohmann::json::parse(slurp(dir / "Annotations" / (q.id + "_aug.json")));
    EXPECT_TRUE(aug["mask"].is_null());
    EXPECT_EQ(aug["originals"], j["originals"]);
  }
  const auto gt = slurp(dir / "Annotations" / "ground_truth.csv");
  EXPECT_EQ(gt.rfind("query_id,reference_id\n", 0), 0u);
  EXPECT_EQ(gt.find("_aug"), std::string::npos);
  EXPECT_NE(slurp(dir / "Annotations" / "augmented_ground_truth.csv").find("Q0000_aug,"), std::string::npos);
}

TEST(DatasetLayout, SameSeedSameBytes) {
  fixtures::TempDir a("dsa"), b("dsb");
  DatasetConfig cfg;
  cfg.references = 6;
  cfg.training = 0;
  cfg.queries = 4;
  cfg.segments = 1;
  cfg.image_size = 32;
  emit_dataset_layout(a.path(), cfg, 1);
  emit_dataset_layout(b.path(), cfg, 4);
  for (const char* rel : {"Query/Q0003.png", "AugmentedQuery/Q0002_aug.png", "Annotations/ground_truth.csv",
                          "Annotations/masks/Q0001.png", "Reference/R0005.png"})
    EXPECT_EQ(read_file_bytes(a / rel), read_file_bytes(b / rel)) << rel;
}

TEST(DatasetLayout, ZeroCountSplits) {
  fixtures::TempDir dir("ds0");
  DatasetConfig cfg;
  cfg.references = 3;
  cfg.training = 0;
  cfg.queries = 0;
  cfg.image_size = 32;
  const auto sum = emit_dataset_layout(dir.path(), cfg);
  EXPECT_TRUE(sum.queries.empty());
  EXPECT_EQ(count_files(dir / "Training"), 0u);
  EXPECT_EQ(count_files(dir / "Query"), 0u);
  EXPECT_EQ(slurp(dir / "Annotations" / "ground_truth.csv"), "query_id,reference_id\n");
  cfg.references = 1;
  cfg.queries = 2;
  EXPECT_TRUE(throws_code([&] { emit_dataset_layout(dir.path(), cfg); }, ErrorCode::InvalidParams));
}

}  // namespace
}  // namespace lookupf
