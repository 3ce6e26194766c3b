#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lookupf/core.hpp"

namespace lookupf {

struct PredictionRow {
  std::string query_id;
  std::string reference_id;
  double score = 0.0;

  friend bool operator==(const PredictionRow&, const PredictionRow&) = default;
};

struct PredictionRun {
  std::vector<PredictionRow> rows;
  std::string manifest;

  void validate() const {
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (const auto& r : rows) {
      if (!std::isfinite(r.score)) {
        throw Error(ErrorCode::InvariantViolation, "non-finite score for " + r.query_id + "," + r.reference_id);
      }
      if (!seen.emplace(r.query_id, r.reference_id).second) {
        throw Error(ErrorCode::DuplicatePrediction, "duplicate prediction " + r.query_id + "," + r.reference_id);
      }
    }
  }
};

inline PredictionRun run_from_reports(const std::vector<VerificationReport>& reports) {
  PredictionRun run;
  for (const auto& rep : reports)
    for (const auto& c : rep.candidates()) run.rows.push_back({rep.query_id(), c.reference_id, c.confidence});
  return run;
}

namespace detail {

// Score descending, then query id, then reference id.
inline std::vector<const PredictionRow*> globally_ranked(const PredictionRun& run) {
  run.validate();
  std::vector<const PredictionRow*> order;
  order.reserve(run.rows.size());
  for (const auto& r : run.rows) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const PredictionRow* a, const PredictionRow* b) {
    if (a->score != b->score) return a->score > b->score;
    if (a->query_id != b->query_id) return a->query_id < b->query_id;
    return a->reference_id < b->reference_id;
  });
  return order;
}

inline std::size_t require_positives(const GroundTruthTable& gt) {
  const auto p = gt.positive_count();
  if (p == 0) throw Error(ErrorCode::EmptyGroundTruth, "ground truth has no positive pairs");
  return p;
}

}  // namespace detail

inline double micro_average_precision(const PredictionRun& run, const GroundTruthTable& gt) {
  const double P = static_cast<double>(detail::require_positives(gt));
  const auto ranked = detail::globally_ranked(run);
  double sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!gt.contains(ranked[i]->query_id, ranked[i]->reference_id)) continue;
    ++correct;
    sum += static_cast<double>(correct) / static_cast<double>(i + 1);
  }
  return sum / P;
}

struct RecallAtPrecision {
  double recall = 0.0;
  std::optional<double> threshold;
};

// Highest recall over descending-score prefixes whose precision is at least
// `precision`; the threshold is the last score of the shortest such prefix.
inline RecallAtPrecision recall_at_precision(const PredictionRun& run, const GroundTruthTable& gt,
                                             double precision) {
  const double P = static_cast<double>(detail::require_positives(gt));
  const auto ranked = detail::globally_ranked(run);
  RecallAtPrecision best;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!gt.contains(ranked[i]->query_id, ranked[i]->reference_id)) continue;
    ++correct;
    const double prec = static_cast<double>(correct) / static_cast<double>(i + 1);
    const double rec = static_cast<double>(correct) / P;
    if (prec >= precision && rec > best.recall) {
      best.recall = rec;
      best.threshold = ranked[i]->score;
    }
  }
  return best;
}

inline RecallAtPrecision recall_at_p90(const PredictionRun& run, const GroundTruthTable& gt) {
  return recall_at_precision(run, gt, 0.9);
}

// Fraction of ground-truth pairs whose reference is among the top-k rows of
// its query (score descending, reference id ascending).
inline double recall_at_rank(const PredictionRun& run, const GroundTruthTable& gt, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
  const double P = static_cast<double>(detail::require_positives(gt));
  run.validate();
  std::map<std::string_view, std::vector<const PredictionRow*>> per_query;
  for (const auto& r : run.rows) per_query[r.query_id].push_back(&r);
  std::size_t hits = 0;
  for (auto& [q, rows] : per_query) {
    std::sort(rows.begin(), rows.end(), [](const PredictionRow* a, const PredictionRow* b) {
      if (a->score != b->score) return a->score > b->score;
      return a->reference_id < b->reference_id;
    });
    const std::size_t take = std::min(k, rows.size());
    for (std::size_t i = 0; i < take; ++i)
      if (gt.contains(rows[i]->query_id, rows[i]->reference_id)) ++hits;
  }
  return static_cast<double>(hits) / P;
}

struct RetrievalMetrics {
  double micro_ap = 0.0;
  double recall_at_p90 = 0.0;
  std::optional<double> threshold_at_p90;
  std::map<std::size_t, double> recall_at_rank;
};

inline RetrievalMetrics evaluate_retrieval(const PredictionRun& run, const GroundTruthTable& gt,
                                           const std::vector<std::size_t>& ranks = {1, 10}) {
  RetrievalMetrics m;
  m.micro_ap = micro_average_precision(run, gt);
  const auto p90 = recall_at_p90(run, gt);
  m.recall_at_p90 = p90.recall;
  m.threshold_at_p90 = p90.threshold;
  for (auto k : ranks) m.recall_at_rank[k] = recall_at_rank(run, gt, k);
  return m;
}

// ---------------------------------------------------------------------------
// Pixel metrics

struct MaskMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
};

inline MaskMetrics mask_metrics(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  const auto p = pred.bits(), g = gt.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += p[i] && g[i];
    fp += p[i] && !g[i];
    fn += !p[i] && g[i];
  }
  MaskMetrics m;
  const bool pred_empty = tp + fp == 0, gt_empty = tp + fn == 0;
  m.precision = pred_empty ? (gt_empty ? 1.0 : 0.0) : static_cast<double>(tp) / (tp + fp);
  m.recall = gt_empty ? (pred_empty ? 1.0 : 0.0) : static_cast<double>(tp) / (tp + fn);
  m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.iou = (tp + fp + fn) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp + fn);
  return m;
}

// ROC AUC via the Mann-Whitney statistic with midranks for ties.
inline double pixel_auc(const std::vector<double>& scores, const BinaryMask& gt) {
  if (scores.size() != gt.size()) throw Error(ErrorCode::DimensionMismatch, "score map size differs from mask");
  const auto bits = gt.bits();
  const std::size_t npos = gt.count(), nneg = gt.size() - npos;
  if (npos == 0 || nneg == 0) throw Error(ErrorCode::DegenerateGroundTruth, "ground-truth mask is single-class");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (bits[order[t]]) pos_rank_sum += midrank;
    i = j;
  }
  const double u = pos_rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0;
  return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

// ---------------------------------------------------------------------------
// Proportion buckets

struct BucketResult {
  std::size_t index = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t queries = 0;
  std::size_t positives = 0;
  std::optional<double> micro_ap;
};

inline std::size_t proportion_bucket(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidParams, "proportion outside [0,1]");
  return std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(p * 10.0)));
}

// Ten buckets [i/10, (i+1)/10), the last closed at 1. Each bucket's µAP uses
// only that bucket's predictions and ground truth.
inline std::vector<BucketResult> proportion_buckets(const PredictionRun& run, const GroundTruthTable& gt,
                                                    const std::map<std::string, double>& proportions) {
  auto bucket_of = [&](const std::string& q) {
    auto it = proportions.find(q);
    if (it == proportions.end()) throw Error(ErrorCode::MissingProportion, "no proportion for query " + q);
    return proportion_bucket(it->second);
  };
  std::vector<PredictionRun> runs(10);
  std::vector<GroundTruthTable> gts(10);
  std::vector<std::set<std::string>> members(10);
  for (const auto& r : run.rows) {
    const auto b = bucket_of(r.query_id);
    runs[b].rows.push_back(r);
    members[b].insert(r.query_id);
  }
  for (const auto& [q, refs] : gt.pairs()) {
    if (refs.empty() && !proportions.count(q)) continue;  // unscored distractor
    const auto b = bucket_of(q);
    gts[b].add_query(q);
    members[b].insert(q);
    for (const auto& r : refs) gts[b].add(q, r);
  }
  std::vector<BucketResult> out(10);
  for (std::size_t i = 0; i < 10; ++i) {
    out[i].index = i;
    out[i].lower = i / 10.0;
    out[i].upper = (i + 1) / 10.0;
    out[i].queries = members[i].size();
    out[i].positives = gts[i].positive_count();
    if (out[i].positives > 0) out[i].micro_ap = micro_average_precision(runs[i], gts[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV files

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                                      std::size_t columns, std::string_view header) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == header) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) {
      throw Error(ErrorCode::MalformedFile,
                  path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedFile, where + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline PredictionRun read_predictions_csv(const std::filesystem::path& path) {
  PredictionRun run;
  for (auto& c : detail::read_csv(path, 3, "query_id,reference_id,score")) {
    run.rows.push_back({std::move(c[0]), std::move(c[1]), detail::parse_double(c[2], path.string())});
  }
  run.validate();
  return run;
}

inline std::string predictions_csv(const PredictionRun& run) {
  std::string out = "query_id,reference_id,score\n";
  for (const auto& r : run.rows) out += r.query_id + "," + r.reference_id + "," + format_double(r.score) + "\n";
  return out;
}

inline GroundTruthTable read_ground_truth_csv(const std::filesystem::path& path) {
  GroundTruthTable gt;
  for (const auto& c : detail::read_csv(path, 2, "query_id,reference_id")) gt.add(c[0], c[1]);
  return gt;
}

inline std::string ground_truth_csv(const GroundTruthTable& gt) {
  std::string out = "query_id,reference_id\n";
  for (const auto& [q, refs] : gt.pairs())
    for (const auto& r : refs) out += q + "," + r + "\n";
  return out;
}

inline std::map<std::string, double> read_proportions_csv(const std::filesystem::path& path) {
  std::map<std::string, double> out;
  for (const auto& c : detail::read_csv(path, 2, "query_id,proportion")) {
    out[c[0]] = detail::parse_double(c[1], path.string());
  }
  return out;
}

}  // namespace lookupf
