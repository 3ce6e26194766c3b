#include <gtest/gtest.h>

#include <atomic>

#include "fixtures.hpp"
#include "lookupf/datagen.hpp"
#include "lookupf/pipeline.hpp"

namespace lookupf {
namespace {

struct Stub {
  bool forged;
  ForgeryType type;
  std::optional<BinaryMask> mask;
};

// Detector that answers from a table keyed by image id.
DetectorSuite stub_suite(std::map<std::string, Stub> table) {
  auto t = std::make_shared<std::map<std::string, Stub>>(std::move(table));
  DetectorSuite s;
  s.name = "stub";
  s.forgery_predictor = [t](const ImageBuffer& img) { return t->at(img.id()).forged ? 0.9 : 0.1; };
  s.type_predictor = [t](const ImageBuffer& img) {
    TypeScores sc{};
    sc[static_cast<std::size_t>(t->at(img.id()).type)] = 1;
    return sc;
  };
  s.mask_predictor = [t](const ImageBuffer& img, ForgeryType) { return *t->at(img.id()).mask; };
  return s;
}

ReferenceIndex corpus_index() {
  const auto ex = gist_extractor();
  IndexBuilder b("gist");
  for (const auto& img : fixtures::corpus()) b.add(img.id(), ex(img));
  return std::move(b).finish();
}

std::vector<Stage> run_trace(Pipeline& p, const ImageBuffer& img) {
  std::vector<Stage> seen;
  p.set_trace([&](Stage s) { seen.push_back(s); });
  p.verify(img);
  p.set_trace(nullptr);
  return seen;
}

TEST(Pipeline, ControlFlowPerCase) {
  const auto idx = corpus_index();
  const auto img = fixtures::corpus()[0];
  const auto blob = fixtures::rect_mask(96, 96, {10, 10, 30, 30});
  const auto empty = BinaryMask(96, 96);
  using S = Stage;
  struct Case {
    std::string name;
    Stub stub;
    std::vector<Stage> expected;
  };
  const std::vector<Case> cases{
      {"authentic", {false, ForgeryType::CopyMove, std::nullopt}, {S::PredictForgery}},
      {"colorization", {true, ForgeryType::Colorization, std::nullopt},
       {S::PredictForgery, S::PredictType, S::GlobalRetrieval, S::Fuse}},
      {"removal", {true, ForgeryType::ObjectRemoval, std::nullopt},
       {S::PredictForgery, S::PredictType, S::GlobalRetrieval, S::Fuse}},
      {"copy-move", {true, ForgeryType::CopyMove, blob},
       {S::PredictForgery, S::PredictType, S::PredictMask, S::GlobalRetrieval, S::ExtractSegments,
        S::LocalRetrieval, S::Fuse}},
      {"splice-empty-mask", {true, ForgeryType::ImageSplicing, empty},
       {S::PredictForgery, S::PredictType, S::PredictMask, S::GlobalRetrieval, S::ExtractSegments, S::Fuse}},
  };
  std::map<std::string, Stub> table;
  for (const auto& c : cases) table[c.name] = c.stub;
  Pipeline p({}, stub_suite(table), gist_extractor(), idx);
  for (const auto& c : cases) {
    EXPECT_EQ(run_trace(p, img.with_id(c.name)), c.expected) << c.name;
  }
  const auto authentic = p.verify(img.with_id("authentic"));
  EXPECT_TRUE(authentic.is_authentic());
  EXPECT_TRUE(authentic.candidates().empty());
  const auto col = p.verify(img.with_id("colorization"));
  EXPECT_FALSE(col.forgery_mask());
  for (const auto& c : col.candidates()) EXPECT_EQ(c.provenance, Provenance::global());
}

TEST(Pipeline, GlobalOnlySkipsLocalStages) {
  const auto idx = corpus_index();
  PipelineConfig cfg;
  cfg.global_only = true;
  Pipeline p(cfg, stub_suite({{"q", {true, ForgeryType::CopyMove, fixtures::rect_mask(96, 96, {0, 0, 40, 40})}}}),
                   gist_extractor(), idx);
  EXPECT_EQ(run_trace(p, fixtures::corpus()[1].with_id("q")),
            (std::vector<Stage>{Stage::PredictForgery, Stage::PredictType, Stage::PredictMask, Stage::GlobalRetrieval,
                                Stage::Fuse}));
}

TEST(Fuse, MaxConfidenceUnion) {
  const auto g = Provenance::global();
  const auto l0 = Provenance::local(0), l1 = Provenance::local(1);
  const auto fused = fuse_candidates({{"a", -0.5, g}, {"b", -0.2, g}}, {{"a", -0.1, l0}, {"c", -0.3, l1}, {"b", -0.9, l0}});
  ASSERT_EQ(fused.size(), 3u);
  EXPECT_EQ(fused[0], (MatchCandidate{"a", -0.1, l0}));
  EXPECT_EQ(fused[1], (MatchCandidate{"b", -0.2, g}));
  EXPECT_EQ(fused[2], (MatchCandidate{"c", -0.3, l1}));
  EXPECT_TRUE(fuse_candidates({}, {}).empty());
}

TEST(Fuse, PropertiesOnRandomLists) {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    std::vector<MatchCandidate> g, l;
    for (int i = rng.uniform_int(0, 6); i > 0; --i)
      g.push_back({std::string(1, static_cast<char>('a' + rng.uniform_int(0, 7))), -std::floor(rng.uniform(0, 5)), Provenance::global()});
    for (int i = rng.uniform_int(0, 6); i > 0; --i)
      l.push_back({std::string(1, static_cast<char>('a' + rng.uniform_int(0, 7))), -std::floor(rng.uniform(0, 5)),
                   Provenance::local(static_cast<std::size_t>(i))});
    const auto f = fuse_candidates(g, l);
    std::set<std::string> ids;
    for (const auto& c : f) {
      EXPECT_TRUE(ids.insert(c.reference_id).second);
      double best = -1e9;
      for (const auto* list : {&g, &l})
        for (const auto& x : *list)
          if (x.reference_id == c.reference_id) best = std::max(best, x.confidence);
      EXPECT_EQ(c.confidence, best);
    }
    for (const auto* list : {&g, &l})
      for (const auto& x : *list) EXPECT_TRUE(ids.count(x.reference_id));
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end(), candidate_order));
    EXPECT_NO_THROW(VerificationReport::forged("q", ForgeryType::CopyMove, std::nullopt, f));
  }
}

TEST(Pipeline, EmptyIndexGivesNoCandidates) {
  const auto idx = std::move(IndexBuilder().fix_dimension(512)).finish();
  const Pipeline p({}, stub_suite({{"q", {true, ForgeryType::CopyMove, fixtures::rect_mask(96, 96, {0, 0, 40, 40})}}}),
                   gist_extractor(), idx);
  const auto r = p.verify(fixtures::corpus()[0].with_id("q"));
  EXPECT_FALSE(r.is_authentic());
  EXPECT_TRUE(r.candidates().empty());
}

TEST(Pipeline, VerbatimReferenceRanksFirstWithZeroDistance) {
  const auto idx = corpus_index();
  const auto& ref = fixtures::corpus()[4];
  const Pipeline p({}, stub_suite({{ref.id(), {true, ForgeryType::Colorization, std::nullopt}}}), gist_extractor(), idx);
  const auto r = p.verify(ref);
  ASSERT_FALSE(r.candidates().empty());
  EXPECT_EQ(r.candidates()[0].reference_id, ref.id());
  EXPECT_EQ(r.candidates()[0].confidence, 0.0);
}

TEST(Pipeline, SplicingRecoversBothOriginals) {
  const auto idx = corpus_index();
  const auto& target = fixtures::corpus()[2];
  const auto& donor = fixtures::corpus()[9];
  ForgeryRecipe rec;
  rec.kind = RecipeKind::Splicing;
  rec.object_mask = fixtures::rect_mask(96, 96, {20, 20, 56, 56});
  rec.dx = 36;
  rec.dy = 36;
  rec.scale = 1.0;
  const auto res = generate_splicing(target, donor, rec);
  const auto q = res.forged.with_id("spliced");
  const Pipeline p({}, stub_suite({{"spliced", {true, ForgeryType::ImageSplicing, res.mask}}}), gist_extractor(), idx);
  const auto report = p.verify(q);
  std::set<std::string> top;
  for (std::size_t i = 0; i < std::min<std::size_t>(report.candidates().size(), 3); ++i)
    top.insert(report.candidates()[i].reference_id);
  EXPECT_TRUE(top.count(target.id()));
  EXPECT_TRUE(top.count(donor.id()));
  bool local_donor = false;
  for (const auto& c : report.candidates())
    if (c.reference_id == donor.id()) local_donor = c.provenance.is_local();
  EXPECT_TRUE(local_donor);
}

TEST(Pipeline, BatchIsolatesErrorsAndIsThreadInvariant) {
  const auto idx = corpus_index();
  std::map<std::string, Stub> table;
  std::vector<std::function<ImageBuffer()>> loaders;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 12; ++i) {
    const auto id = fixtures::id("Q", i);
    ids.push_back(id);
    if (i == 5) {
      loaders.push_back([] () -> ImageBuffer { throw Error(ErrorCode::Decode, "corrupt file"); });
      continue;
    }
    table[id] = {i % 3 != 0, i % 2 ? ForgeryType::ImageSplicing : ForgeryType::CopyMove,
                 fixtures::rect_mask(96, 96, {static_cast<int>(i), 8, 30, 30})};
    const auto img = fixtures::corpus()[i].with_id(id);
    loaders.push_back([img] { return img; });
  }
  auto suite = stub_suite(table);
  suite.thread_safe = false;
  const Pipeline p({}, suite, gist_extractor(), idx);
  const auto one = p.verify_batch(loaders, ids, 1);
  const auto many = p.verify_batch(loaders, ids, 8);
  ASSERT_EQ(one.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(one[i].query_id, ids[i]);
    if (i == 5) {
      EXPECT_FALSE(one[i].report);
      EXPECT_NE(one[i].error.find("corrupt"), std::string::npos);
      continue;
    }
    ASSERT_TRUE(one[i].report) << one[i].error;
    ASSERT_TRUE(many[i].report);
    EXPECT_EQ(one[i].report->candidates(), many[i].report->candidates());
    EXPECT_EQ(one[i].report->is_authentic(), i % 3 == 0);
  }
}

TEST(PipelineConfig, Validation) {
  const auto idx = corpus_index();
  PipelineConfig cfg;
  cfg.topk_global = 0;
  EXPECT_THROW(Pipeline(cfg, stub_suite({}), gist_extractor(), idx), Error);
  cfg = {};
  cfg.segments.max_segments = 0;
  EXPECT_THROW(Pipeline(cfg, stub_suite({}), gist_extractor(), idx), Error);
}

}  // namespace
}  // namespace lookupf
