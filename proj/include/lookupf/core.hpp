#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lookupf/error.hpp"

namespace lookupf {

// Decoded 8-bit raster, row-major, interleaved channels. Channel count is
// 1 (luminance) or 3 (RGB).
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> pixels,
              std::string id = {})
      : width_(width), height_(height), channels_(channels),
        pixels_(std::move(pixels)), id_(std::move(id)) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidImage, "image dimensions must be >= 1");
    }
    if (channels != 1 && channels != 3) {
      throw Error(ErrorCode::InvalidImage, "channel count must be 1 or 3");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw Error(ErrorCode::InvalidImage, "pixel buffer length does not match dimensions");
    }
  }

  // Filled with a constant sample value.
  static ImageBuffer filled(int width, int height, int channels, std::uint8_t value,
                            std::string id = {}) {
    return ImageBuffer(width, height, channels,
                       std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * channels,
                                                 value),
                       std::move(id));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  const std::string& id() const noexcept { return id_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  ImageBuffer with_id(std::string id) const {
    ImageBuffer copy = *this;
    copy.id_ = std::move(id);
    return copy;
  }

  friend bool operator==(const ImageBuffer& a, const ImageBuffer& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.channels_ == b.channels_ &&
           a.pixels_ == b.pixels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
  std::string id_;
};

// Per-pixel forgery annotation, 1 = forged.
class BinaryMask {
 public:
  BinaryMask() = default;

  BinaryMask(int width, int height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::InvalidParams, "mask dimensions must be non-negative");
    }
  }

  BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
      : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 0 || height < 0 ||
        bits_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorCode::InvalidParams, "mask bit buffer length does not match dimensions");
    }
    for (auto b : bits_) {
      if (b > 1) throw Error(ErrorCode::InvalidParams, "mask values must be 0 or 1");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  std::size_t size() const noexcept { return bits_.size(); }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class ForgeryType { CopyMove = 0, ImageSplicing = 1, ObjectRemoval = 2, Colorization = 3 };

inline constexpr std::array<ForgeryType, 4> kAllForgeryTypes = {
    ForgeryType::CopyMove, ForgeryType::ImageSplicing, ForgeryType::ObjectRemoval,
    ForgeryType::Colorization};

constexpr std::string_view canonical_name(ForgeryType t) {
  switch (t) {
    case ForgeryType::CopyMove: return "copy-move";
    case ForgeryType::ImageSplicing: return "image-splicing";
    case ForgeryType::ObjectRemoval: return "object-removal";
    case ForgeryType::Colorization: return "colorization";
  }
  return "unknown";
}

inline ForgeryType parse_forgery_type(std::string_view s) {
  std::string folded(s);
  std::transform(folded.begin(), folded.end(), folded.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (folded == "copy-move") return ForgeryType::CopyMove;
  if (folded == "image-splicing" || folded == "image splicing") return ForgeryType::ImageSplicing;
  if (folded == "object-removal" || folded == "inpainting") return ForgeryType::ObjectRemoval;
  if (folded == "colorization") return ForgeryType::Colorization;
  throw Error(ErrorCode::UnknownForgeryType, "unrecognized forgery type '" + std::string(s) + "'");
}

// Types for which a forgery mask is predicted and local retrieval runs.
constexpr bool is_localized(ForgeryType t) {
  return t == ForgeryType::CopyMove || t == ForgeryType::ImageSplicing;
}

inline void validate_pair(const ImageBuffer& img, const BinaryMask& mask) {
  if (img.width() != mask.width() || img.height() != mask.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " vs mask " + std::to_string(mask.width()) + "x" +
                    std::to_string(mask.height()));
  }
}

struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const Box&, const Box&) = default;
};

struct Segment {
  Box box;
  BinaryMask mask_crop;
  ImageBuffer image_crop;  // parent pixels inside box
  std::size_t area = 0;
  std::string parent_id;
  std::size_t index = 0;
};

// Where a candidate came from: the whole image, or segment `segment` of it.
struct Provenance {
  std::optional<std::size_t> segment;

  static Provenance global() { return {}; }
  static Provenance local(std::size_t index) { return Provenance{index}; }
  bool is_local() const noexcept { return segment.has_value(); }

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct MatchCandidate {
  std::string reference_id;
  double confidence = 0.0;
  Provenance provenance;

  friend bool operator==(const MatchCandidate&, const MatchCandidate&) = default;
};

// Confidence descending, then id ascending.
inline bool candidate_order(const MatchCandidate& a, const MatchCandidate& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return a.reference_id < b.reference_id;
}

class VerificationReport {
 public:
  static VerificationReport authentic(std::string query_id) {
    VerificationReport r;
    r.query_id_ = std::move(query_id);
    r.authentic_ = true;
    return r;
  }

  static VerificationReport forged(std::string query_id, ForgeryType type,
                                   std::optional<BinaryMask> mask,
                                   std::vector<MatchCandidate> candidates) {
    VerificationReport r;
    r.query_id_ = std::move(query_id);
    r.authentic_ = false;
    r.type_ = type;
    r.mask_ = std::move(mask);
    r.candidates_ = std::move(candidates);
    r.check();
    return r;
  }

  const std::string& query_id() const noexcept { return query_id_; }
  bool is_authentic() const noexcept { return authentic_; }
  const std::optional<ForgeryType>& forgery_type() const noexcept { return type_; }
  const std::optional<BinaryMask>& forgery_mask() const noexcept { return mask_; }
  const std::vector<MatchCandidate>& candidates() const noexcept { return candidates_; }

 private:
  VerificationReport() = default;

  void check() const {
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (!std::isfinite(candidates_[i].confidence)) {
        throw Error(ErrorCode::InvariantViolation, "non-finite candidate confidence");
      }
      if (i > 0 && candidates_[i].confidence > candidates_[i - 1].confidence) {
        throw Error(ErrorCode::InvariantViolation, "candidates not sorted by confidence");
      }
      if (!seen.insert(candidates_[i].reference_id).second) {
        throw Error(ErrorCode::InvariantViolation,
                    "duplicate candidate reference id " + candidates_[i].reference_id);
      }
    }
  }

  std::string query_id_;
  bool authentic_ = true;
  std::optional<ForgeryType> type_;
  std::optional<BinaryMask> mask_;
  std::vector<MatchCandidate> candidates_;
};

// query id -> originals (at most two). Queries with no originals are
// distractors and may be present with an empty set.
class GroundTruthTable {
 public:
  void add_query(const std::string& query_id) { pairs_[query_id]; }

  void add(const std::string& query_id, const std::string& reference_id) {
    auto& refs = pairs_[query_id];
    refs.insert(reference_id);
    if (refs.size() > 2) {
      refs.erase(reference_id);
      throw Error(ErrorCode::TooManyOriginals,
                  "query " + query_id + " would map to more than two originals");
    }
  }

  bool contains(const std::string& query_id, const std::string& reference_id) const {
    auto it = pairs_.find(query_id);
    return it != pairs_.end() && it->second.count(reference_id) > 0;
  }

  std::size_t positive_count() const {
    std::size_t n = 0;
    for (const auto& [q, refs] : pairs_) n += refs.size();
    return n;
  }

  const std::map<std::string, std::set<std::string>>& pairs() const noexcept { return pairs_; }

 private:
  std::map<std::string, std::set<std::string>> pairs_;
};

}  // namespace lookupf
