#include <gtest/gtest.h>

#include "assertions.hpp"
#include "fixtures.hpp"
#include "lookupf/index.hpp"
#include "lookupf/maskops.hpp"
#include "oracles.hpp"

namespace lookupf {
namespace {

using fixtures::throws_code;

ReferenceIndex random_index(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  IndexBuilder b("random");
  for (std::size_t i = 0; i < n; ++i) {
    Descriptor v;
    for (std::size_t j = 0; j < d; ++j) v.values.push_back(static_cast<float>(rng.normal()));
    b.add(fixtures::id("R", i), v);
  }
  return std::move(b).finish();
}

TEST(Store, RoundTripIsByteExact) {
  const DescriptorStore s{4, "gist/test", {{"a", {1, 2, 3, 4}}, {"bb", {-0.5f, 0, 1e-30f, 7}}}};
  const auto bytes = encode_store(s);
  const auto back = decode_store(bytes);
  EXPECT_EQ(back, s);
  EXPECT_EQ(encode_store(back), bytes);
}

TEST(Store, HeaderLayout) {
  const auto bytes = encode_store(DescriptorStore{2, "m", {}});
  // magic, version, dim u32, count u64, manifest len u16, manifest, crc
  ASSERT_EQ(bytes.size(), 4u + 1 + 4 + 8 + 2 + 1 + 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "LFDS");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 2);  // little-endian dim
}

TEST(Store, CorruptionIsDetected) {
  const auto good = encode_store(DescriptorStore{3, "m", {{"a", {1, 2, 3}}, {"b", {4, 5, 6}}}});

  auto flipped = good;
  flipped[flipped.size() - 8] ^= 0x40;
  EXPECT_TRUE(throws_code([&] { decode_store(flipped); }, ErrorCode::ChecksumMismatch));

  for (std::size_t cut : {std::size_t{2}, std::size_t{10}, good.size() - 9, good.size() - 1}) {
    const std::vector<std::uint8_t> trunc(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_TRUE(throws_code([&] { decode_store(trunc); }, ErrorCode::TruncatedFile)) << cut;
  }

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(decode_store(trailing), Error);

  auto version = good;
  version[4] = 9;
  EXPECT_TRUE(throws_code([&] { decode_store(version); }, ErrorCode::UnsupportedVersion));
}

TEST(Store, DimensionMismatchOnEncode) {
  EXPECT_TRUE(throws_code([] { encode_store(DescriptorStore{3, "", {{"a", {1, 2}}}}); },
                          ErrorCode::DimensionMismatch));
}

TEST(Store, Crc32KnownValue) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32_of(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()), 0xCBF43926u);
}

TEST(Index, SaveLoadPreservesEverything) {
  fixtures::TempDir dir("idx");
  const auto idx = random_index(30, 16, 1);
  save_index(idx, dir / "i.lfds");
  EXPECT_EQ(load_index(dir / "i.lfds"), idx);
}

TEST(Index, BuilderRejectsDuplicatesAndMixedDims) {
  IndexBuilder b;
  b.add("a", Descriptor{{1, 2}, false});
  EXPECT_TRUE(throws_code([&] { b.add("a", Descriptor{{1, 2}, false}); }, ErrorCode::DuplicateId));
  EXPECT_TRUE(throws_code([&] { b.add("b", Descriptor{{1, 2, 3}, false}); }, ErrorCode::DimensionMismatch));
}

TEST(QueryTopk, MatchesFullSortOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto idx = random_index(60, 12, seed);
    std::vector<std::vector<float>> vecs;
    for (std::size_t i = 0; i < idx.size(); ++i) vecs.emplace_back(idx.vector(i).begin(), idx.vector(i).end());
    Rng rng(seed + 100);
    Descriptor q;
    for (int j = 0; j < 12; ++j) q.values.push_back(static_cast<float>(rng.normal()));
    for (std::size_t k : {1, 5, 60, 100}) {
      const auto got = query_topk(idx, q, k);
      const auto want = oracle::naive_topk(idx.ids(), vecs, q.values, k);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].reference_id, want[i].first);
        EXPECT_NEAR(got[i].confidence, want[i].second, 1e-9);
        EXPECT_EQ(got[i].provenance, Provenance::global());
      }
    }
  }
}

TEST(QueryTopk, TiesBreakByIdAscending) {
  IndexBuilder b;
  for (const char* id : {"d", "b", "c", "a"}) b.add(id, Descriptor{{1, 0}, true});
  const auto idx = std::move(b).finish();
  const auto got = query_topk(idx, Descriptor{{0, 1}, true}, 3);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].reference_id, "a");
  EXPECT_EQ(got[1].reference_id, "b");
  EXPECT_EQ(got[2].reference_id, "c");
}

TEST(QueryTopk, EdgeCases) {
  const auto idx = random_index(3, 4, 9);
  EXPECT_EQ(query_topk(idx, Descriptor{{0, 0, 0, 0}, false}, 10).size(), 3u);
  EXPECT_TRUE(throws_code([&] { query_topk(idx, Descriptor{{0, 0}, false}, 1); }, ErrorCode::DimensionMismatch));
  EXPECT_TRUE(throws_code([&] { query_topk(idx, Descriptor{{0, 0, 0, 0}, false}, 0); }, ErrorCode::InvalidParams));
  const auto empty = std::move(IndexBuilder().fix_dimension(4)).finish();
  EXPECT_TRUE(query_topk(empty, Descriptor{{0, 0, 0, 0}, false}, 5).empty());
}

TEST(QueryTopk, ThreadCountDoesNotChangeBatches) {
  const auto idx = random_index(80, 8, 3);
  std::vector<Descriptor> qs;
  Rng rng(4);
  for (int i = 0; i < 25; ++i) {
    Descriptor q;
    for (int j = 0; j < 8; ++j) q.values.push_back(static_cast<float>(rng.normal()));
    qs.push_back(q);
  }
  EXPECT_EQ(query_batch(idx, qs, 7, 1), query_batch(idx, qs, 7, 8));
}

TEST(SegmentRetrieval, VerbatimCropRanksFirst) {
  const auto& corpus = fixtures::corpus();
  const auto ex = gist_extractor();
  IndexBuilder b;
  for (const auto& img : corpus) b.add(img.id(), ex(crop(img, {20, 16, 48, 56})));
  const auto idx = std::move(b).finish();

  const auto& parent = corpus[7];
  const auto m = fixtures::rect_mask(96, 96, {20, 16, 48, 56});
  const auto segs = extract_segments(parent, m);
  ASSERT_EQ(segs.size(), 1u);
  const auto got = retrieve_original_segment(idx, segs[0], ex, 3);
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got[0].reference_id, parent.id());
  EXPECT_EQ(got[0].confidence, 0.0);
  EXPECT_EQ(got[0].provenance, Provenance::local(0));
}

TEST(SegmentRetrieval, SinglePixelSegmentStillQueries) {
  const auto idx = random_index(5, 512, 2);
  Segment s;
  s.box = {3, 3, 1, 1};
  s.mask_crop = BinaryMask(1, 1, {1});
  s.image_crop = ImageBuffer::filled(1, 1, 3, 90);
  s.area = 1;
  const auto got = retrieve_original_segment(idx, s, gist_extractor(), 2);
  EXPECT_EQ(got.size(), 2u);
}

}  // namespace
}  // namespace lookupf
