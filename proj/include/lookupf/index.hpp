#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lookupf/core.hpp"
#include "lookupf/descriptor.hpp"
#include "lookupf/parallel.hpp"
#include "lookupf/store.hpp"

namespace lookupf {

// Exact brute-force index over reference descriptors. Entries keep insertion
// order; vectors are stored as f32 and distances accumulated in f64.
class ReferenceIndex {
 public:
  ReferenceIndex() = default;

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::uint32_t dim() const noexcept { return dim_; }
  const std::string& manifest() const noexcept { return manifest_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  double distance_to(std::size_t i, const Descriptor& q) const {
    const float* v = data_.data() + i * dim_;
    double s = 0.0;
    for (std::uint32_t j = 0; j < dim_; ++j) {
      const double d = static_cast<double>(q.values[j]) - v[j];
      s += d * d;
    }
    return std::sqrt(s);
  }

  DescriptorStore to_store() const {
    DescriptorStore store;
    store.dim = dim_;
    store.manifest = manifest_;
    store.records.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      auto v = vector(i);
      store.records.push_back({ids_[i], std::vector<float>(v.begin(), v.end())});
    }
    return store;
  }

  static ReferenceIndex from_store(const DescriptorStore& store) {
    ReferenceIndex idx;
    idx.dim_ = store.dim;
    idx.manifest_ = store.manifest;
    std::unordered_set<std::string> seen;
    for (const auto& rec : store.records) {
      if (!seen.insert(rec.id).second) {
        throw Error(ErrorCode::DuplicateId, "duplicate reference id " + rec.id);
      }
      if (rec.values.size() != store.dim) {
        throw Error(ErrorCode::DimensionMismatch, "record " + rec.id + " has wrong dimension");
      }
      idx.ids_.push_back(rec.id);
      idx.data_.insert(idx.data_.end(), rec.values.begin(), rec.values.end());
    }
    return idx;
  }

  friend bool operator==(const ReferenceIndex&, const ReferenceIndex&) = default;

 private:
  friend class IndexBuilder;

  std::uint32_t dim_ = 0;
  std::string manifest_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
};

// Single-writer construction; finish() hands out the immutable index.
class IndexBuilder {
 public:
  explicit IndexBuilder(std::string manifest = {}) { index_.manifest_ = std::move(manifest); }

  IndexBuilder& add(const std::string& id, const Descriptor& d) {
    if (index_.ids_.empty() && !dim_fixed_) {
      index_.dim_ = static_cast<std::uint32_t>(d.dim());
      dim_fixed_ = true;
    } else if (d.dim() != index_.dim_) {
      throw Error(ErrorCode::DimensionMismatch, "descriptor for " + id + " has dimension " +
                                                    std::to_string(d.dim()) + ", index has " +
                                                    std::to_string(index_.dim_));
    }
    if (!seen_.insert(id).second) throw Error(ErrorCode::DuplicateId, "duplicate id " + id);
    for (float v : d.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "non-finite value in " + id);
    }
    index_.ids_.push_back(id);
    index_.data_.insert(index_.data_.end(), d.values.begin(), d.values.end());
    return *this;
  }

  // An index with no entries has undefined dimension until one is fixed.
  IndexBuilder& fix_dimension(std::uint32_t dim) {
    if (!index_.ids_.empty() && dim != index_.dim_) {
      throw Error(ErrorCode::DimensionMismatch, "dimension already fixed");
    }
    index_.dim_ = dim;
    dim_fixed_ = true;
    return *this;
  }

  ReferenceIndex finish() && { return std::move(index_); }

 private:
  ReferenceIndex index_;
  std::unordered_set<std::string> seen_;
  bool dim_fixed_ = false;
};

inline ReferenceIndex build_index(const std::vector<std::pair<std::string, Descriptor>>& items,
                                  std::string manifest = {}) {
  IndexBuilder b(std::move(manifest));
  for (const auto& [id, d] : items) b.add(id, d);
  return std::move(b).finish();
}

// The k nearest entries as candidates with confidence = -distance, ordered by
// confidence descending then id ascending.
inline std::vector<MatchCandidate> query_topk(const ReferenceIndex& idx, const Descriptor& q,
                                              std::size_t k,
                                              Provenance provenance = Provenance::global()) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
  if (idx.empty()) return {};
  if (q.dim() != idx.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query dimension " + std::to_string(q.dim()) +
                                                  " vs index dimension " +
                                                  std::to_string(idx.dim()));
  }
  std::vector<double> dist(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) dist[i] = idx.distance_to(i, q);
  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& ids = idx.ids();
  auto closer = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return ids[a] < ids[b];
  };
  const std::size_t take = std::min(k, idx.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    closer);
  std::vector<MatchCandidate> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    out.push_back({ids[order[r]], 0.0 - dist[order[r]], provenance});  // no -0.0 for exact hits
  }
  return out;
}

inline std::vector<std::vector<MatchCandidate>> query_batch(const ReferenceIndex& idx,
                                                            const std::vector<Descriptor>& queries,
                                                            std::size_t k, unsigned threads) {
  std::vector<std::vector<MatchCandidate>> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = query_topk(idx, queries[i], k); });
  return out;
}

inline std::vector<MatchCandidate> retrieve_original_segment(const ReferenceIndex& idx,
                                                             const Segment& seg,
                                                             const Extractor& extractor,
                                                             std::size_t k) {
  if (idx.empty()) return {};
  if (seg.image_crop.empty()) {
    throw Error(ErrorCode::InvalidParams, "segment carries no image crop");
  }
  return query_topk(idx, extractor(seg.image_crop), k, Provenance::local(seg.index));
}

inline void save_index(const ReferenceIndex& idx, const std::filesystem::path& path) {
  save_store(idx.to_store(), path);
}

inline ReferenceIndex load_index(const std::filesystem::path& path) {
  return ReferenceIndex::from_store(load_store(path));
}

}  // namespace lookupf
