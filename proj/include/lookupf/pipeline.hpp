#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lookupf/core.hpp"
#include "lookupf/descriptor.hpp"
#include "lookupf/detect.hpp"
#include "lookupf/index.hpp"
#include "lookupf/maskops.hpp"
#include "lookupf/parallel.hpp"

namespace lookupf {

enum class FusionRule { MaxConfidence };

struct PipelineConfig {
  std::size_t topk_global = 10;
  std::size_t topk_local = 5;
  SegmentParams segments{};
  FusionRule fusion = FusionRule::MaxConfidence;
  bool global_only = false;  // baseline: skip local retrieval entirely

  void validate() const {
    if (topk_global < 1 || topk_local < 1) throw Error(ErrorCode::InvalidParams, "top-k must be >= 1");
    if (segments.max_segments < 1) throw Error(ErrorCode::InvalidParams, "max_segments must be >= 1");
  }
};

enum class Stage {
  PredictForgery,
  PredictType,
  PredictMask,
  GlobalRetrieval,
  ExtractSegments,
  LocalRetrieval,
  Fuse,
};

constexpr std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::PredictForgery: return "predict_forgery";
    case Stage::PredictType: return "predict_type";
    case Stage::PredictMask: return "predict_mask";
    case Stage::GlobalRetrieval: return "global_retrieval";
    case Stage::ExtractSegments: return "extract_segments";
    case Stage::LocalRetrieval: return "local_retrieval";
    case Stage::Fuse: return "fuse";
  }
  return "unknown";
}

using StageTrace = std::function<void(Stage)>;

struct IdentificationResult {
  bool forged = false;
  std::optional<ForgeryType> type;
  std::optional<BinaryMask> mask;
};

// Max-confidence union by reference id; the kept entry keeps its provenance.
inline std::vector<MatchCandidate> fuse_candidates(const std::vector<MatchCandidate>& global,
                                                   const std::vector<MatchCandidate>& local) {
  std::map<std::string, MatchCandidate> best;
  for (const auto* list : {&global, &local}) {
    for (const auto& c : *list) {
      auto [it, inserted] = best.try_emplace(c.reference_id, c);
      if (!inserted && c.confidence > it->second.confidence) it->second = c;
    }
  }
  std::vector<MatchCandidate> out;
  out.reserve(best.size());
  for (auto& [id, c] : best) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(), candidate_order);
  return out;
}

struct BatchItem {
  std::string query_id;
  std::optional<VerificationReport> report;
  std::string error;  // empty on success
};

class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, DetectorSuite suite, Extractor extractor, const ReferenceIndex& index)
      : cfg_(std::move(cfg)), suite_(std::move(suite)), extractor_(std::move(extractor)), index_(&index) {
    cfg_.validate();
  }

  void set_trace(StageTrace trace) { trace_ = std::move(trace); }
  const PipelineConfig& config() const noexcept { return cfg_; }

  IdentificationResult forgery_identification(const ImageBuffer& img) const {
    IdentificationResult r;
    note(Stage::PredictForgery);
    r.forged = detector([&] { return predict_forgery(suite_, img).flag; });
    if (!r.forged) return r;
    note(Stage::PredictType);
    r.type = detector([&] { return predict_forgery_type(suite_, img); });
    if (is_localized(*r.type)) {
      note(Stage::PredictMask);
      r.mask = detector([&] { return predict_forgery_mask(suite_, img, *r.type); });
    }
    return r;
  }

  std::vector<MatchCandidate> global_retrieval(const ImageBuffer& img) const {
    note(Stage::GlobalRetrieval);
    if (index_->empty()) return {};
    return query_topk(*index_, extractor_(img), cfg_.topk_global, Provenance::global());
  }

  std::vector<MatchCandidate> local_retrieval(const std::vector<Segment>& segments) const {
    note(Stage::LocalRetrieval);
    std::vector<MatchCandidate> out;
    for (const auto& seg : segments) {
      auto part = retrieve_original_segment(*index_, seg, extractor_, cfg_.topk_local);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  std::vector<MatchCandidate> fact_retrieval(const ImageBuffer& img, ForgeryType type,
                                             const std::optional<BinaryMask>& mask) const {
    auto global = global_retrieval(img);
    std::vector<MatchCandidate> local;
    if (!cfg_.global_only && is_localized(type) && mask) {
      note(Stage::ExtractSegments);
      const auto segments = extract_segments(img, *mask, cfg_.segments);
      if (!segments.empty()) local = local_retrieval(segments);
    }
    note(Stage::Fuse);
    return fuse_candidates(global, local);
  }

  VerificationReport verify(const ImageBuffer& img) const {
    auto id = forgery_identification(img);
    if (!id.forged) return VerificationReport::authentic(img.id());
    auto candidates = fact_retrieval(img, *id.type, id.mask);
    return VerificationReport::forged(img.id(), *id.type, std::move(id.mask), std::move(candidates));
  }

  // One failing image yields an error entry, never a partial report.
  std::vector<BatchItem> verify_batch(const std::vector<std::function<ImageBuffer()>>& loaders,
                                      const std::vector<std::string>& ids, unsigned threads) const {
    std::vector<BatchItem> out(loaders.size());
    parallel_for(loaders.size(), threads, [&](std::size_t i) {
      out[i].query_id = ids[i];
      try {
        out[i].report = verify(loaders[i]());
      } catch (const std::exception& e) {
        out[i].report.reset();
        out[i].error = e.what();
      }
    });
    return out;
  }

 private:
  void note(Stage s) const {
    if (trace_) trace_(s);
  }

  // Runs a detector call, serialized when the suite is not thread safe.
  template <typename Fn>
  auto detector(Fn&& fn) const -> decltype(fn()) {
    if (suite_.thread_safe) return fn();
    std::lock_guard lock(detector_mutex_);
    return fn();
  }

  PipelineConfig cfg_;
  DetectorSuite suite_;
  Extractor extractor_;
  const ReferenceIndex* index_;
  StageTrace trace_;
  mutable std::mutex detector_mutex_;
};

}  // namespace lookupf
