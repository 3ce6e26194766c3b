#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lookupf/core.hpp"
#include "lookupf/rng.hpp"

namespace lookupf {
namespace {

TEST(ForgeryType, ParsesCanonicalAndAliasSpellings) {
  EXPECT_EQ(parse_forgery_type("copy-move"), ForgeryType::CopyMove);
  EXPECT_EQ(parse_forgery_type("COLORIZATION"), ForgeryType::Colorization);
  EXPECT_EQ(parse_forgery_type("image splicing"), ForgeryType::ImageSplicing);
  EXPECT_EQ(parse_forgery_type("Image-Splicing"), ForgeryType::ImageSplicing);
  EXPECT_EQ(parse_forgery_type("inpainting"), ForgeryType::ObjectRemoval);
  EXPECT_EQ(parse_forgery_type("object-removal"), ForgeryType::ObjectRemoval);
}

TEST(ForgeryType, RejectsUnknownNames) {
  try {
    parse_forgery_type("deepfake");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownForgeryType);
  }
  EXPECT_THROW(parse_forgery_type(""), Error);
  EXPECT_THROW(parse_forgery_type("copy move"), Error);
}

TEST(ForgeryType, CanonicalNameRoundTrips) {
  for (auto t : kAllForgeryTypes) EXPECT_EQ(parse_forgery_type(canonical_name(t)), t);
}

TEST(ForgeryType, OnlyCopyMoveAndSplicingAreLocalized) {
  EXPECT_TRUE(is_localized(ForgeryType::CopyMove));
  EXPECT_TRUE(is_localized(ForgeryType::ImageSplicing));
  EXPECT_FALSE(is_localized(ForgeryType::ObjectRemoval));
  EXPECT_FALSE(is_localized(ForgeryType::Colorization));
}

TEST(ValidatePair, MatchingAndMismatchedDimensions) {
  EXPECT_NO_THROW(validate_pair(ImageBuffer::filled(64, 64, 3, 0), BinaryMask(64, 64)));
  EXPECT_NO_THROW(validate_pair(ImageBuffer::filled(1, 1, 1, 0), BinaryMask(1, 1)));
  try {
    validate_pair(ImageBuffer::filled(64, 64, 3, 0), BinaryMask(32, 32));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ImageBuffer, RejectsInconsistentConstruction) {
  EXPECT_THROW(ImageBuffer(2, 2, 3, std::vector<std::uint8_t>(11)), Error);
  EXPECT_THROW(ImageBuffer(2, 2, 4, std::vector<std::uint8_t>(16)), Error);
  EXPECT_THROW(ImageBuffer(0, 2, 1, std::vector<std::uint8_t>{}), Error);
  const ImageBuffer ok(2, 1, 3, {1, 2, 3, 4, 5, 6}, "x");
  EXPECT_EQ(ok.at(1, 0, 2), 6);
  EXPECT_EQ(ok.id(), "x");
}

TEST(BinaryMask, RejectsNonBinaryValues) {
  EXPECT_THROW(BinaryMask(2, 1, {0, 2}), Error);
  EXPECT_THROW(BinaryMask(2, 2, {0, 1}), Error);
  const BinaryMask m(2, 1, {0, 1});
  EXPECT_EQ(m.count(), 1u);
}

TEST(VerificationReport, AuthenticCarriesNothing) {
  const auto r = VerificationReport::authentic("q");
  EXPECT_TRUE(r.is_authentic());
  EXPECT_FALSE(r.forgery_type());
  EXPECT_FALSE(r.forgery_mask());
  EXPECT_TRUE(r.candidates().empty());
}

TEST(VerificationReport, EnforcesCandidateInvariants) {
  const auto global = Provenance::global();
  EXPECT_NO_THROW(VerificationReport::forged("q", ForgeryType::CopyMove, std::nullopt,
                                             {{"a", -0.1, global}, {"b", -0.1, global}, {"c", -0.5, global}}));
  auto expect_violation = [](std::vector<MatchCandidate> c) {
    try {
      VerificationReport::forged("q", ForgeryType::ImageSplicing, std::nullopt, std::move(c));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
    }
  };
  expect_violation({{"a", -0.5, global}, {"b", -0.1, global}});
  expect_violation({{"a", -0.1, global}, {"a", -0.2, Provenance::local(0)}});
  expect_violation({{"a", std::numeric_limits<double>::quiet_NaN(), global}});
  expect_violation({{"a", std::numeric_limits<double>::infinity(), global}});
}

TEST(GroundTruthTable, AtMostTwoOriginals) {
  GroundTruthTable gt;
  gt.add("q", "r1");
  gt.add("q", "r2");
  gt.add("q", "r2");  // set semantics
  try {
    gt.add("q", "r3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyOriginals);
  }
  EXPECT_EQ(gt.positive_count(), 2u);
  EXPECT_FALSE(gt.contains("q", "r3"));
  gt.add_query("distractor");
  EXPECT_EQ(gt.pairs().size(), 2u);
}

TEST(Rng, ItemSeedIsOrderIndependentAndDistinct) {
  EXPECT_EQ(item_seed(7, "Q0001"), item_seed(7, "Q0001"));
  EXPECT_NE(item_seed(7, "Q0001"), item_seed(7, "Q0002"));
  EXPECT_NE(item_seed(7, "Q0001"), item_seed(8, "Q0001"));
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, UniformIntCoversClosedRange) {
  Rng rng(3);
  int lo = 10, hi = -10;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(-2, 2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_EQ(lo, -2);
  EXPECT_EQ(hi, 2);
}

}  // namespace
}  // namespace lookupf
