#pragma once

// Independent reference implementations used only by tests. They trade speed
// for obviousness: exhaustive enumeration instead of greedy search.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "deid/eval.hpp"
#include "deid/merge.hpp"

namespace deid::oracle {

/// Rank comparator written from the policy description: priority, then each
/// configured tie-break, then a fixed order on the remaining fields.
inline bool better(const EntityChunk& a, const EntityChunk& b, const MergePolicy& policy) {
  const int pa = policy.priority(a), pb = policy.priority(b);
  if (pa != pb) return pa > pb;
  for (TieBreak t : policy.tie_break()) {
    switch (t) {
      case TieBreak::LongerSpan:
        if (a.span.length() != b.span.length()) return a.span.length() > b.span.length();
        break;
      case TieBreak::HigherConfidence:
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        break;
      case TieBreak::EarlierStart:
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        break;
      case TieBreak::LexicographicSource:
        if (a.source != b.source) return a.source < b.source;
        break;
    }
  }
  return std::tie(a.span.start, a.span.end, a.source, a.label, a.source_class, a.confidence) <
         std::tie(b.span.start, b.span.end, b.source, b.label, b.source_class, b.confidence);
}

/// Enumerates every pairwise non-overlapping subset and keeps the one that is
/// lexicographically greatest when chunks are listed best-ranked first.
inline MergedChunks brute_force_merge(std::vector<EntityChunk> chunks, const MergePolicy& policy) {
  std::sort(chunks.begin(), chunks.end(), [&](const auto& a, const auto& b) { return better(a, b, policy); });
  chunks.erase(std::unique(chunks.begin(), chunks.end()), chunks.end());
  const std::size_t n = chunks.size();
  if (n > 20) throw std::length_error("brute_force_merge: more than 20 chunks");

  std::vector<std::uint32_t> conflict(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && chunks[i].span.overlaps(chunks[j].span)) conflict[i] |= 1u << j;
    }
  }
  // Bit (n-1-i) stands for chunk i, so the integer order of encodings is the
  // lexicographic order of membership vectors.
  std::uint32_t best_code = 0;
  std::uint32_t best_set = 0;
  for (std::uint32_t set = 0; set < (1u << n); ++set) {
    bool ok = true;
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(set >> i & 1u)) continue;
      ok = (set & conflict[i]) == 0;
      code |= 1u << (n - 1 - i);
    }
    if (ok && code >= best_code) {
      best_code = code;
      best_set = set;
    }
  }
  MergedChunks out;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_set >> i & 1u) (chunks[i].phi ? out.chunks : out.suppressors).push_back(chunks[i]);
  }
  auto by_span = [](const EntityChunk& a, const EntityChunk& b) { return a.span < b.span; };
  std::sort(out.chunks.begin(), out.chunks.end(), by_span);
  std::sort(out.suppressors.begin(), out.suppressors.end(), by_span);
  return out;
}

inline bool compatible(const Annotation& p, const Annotation& g, const MatchSpec& spec, bool ignore_labels) {
  const std::size_t lo = std::max(p.span.start, g.span.start);
  const std::size_t hi = std::min(p.span.end, g.span.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  if (inter == 0) return false;
  if (spec.mode == MatchMode::Coverage) {
    if (static_cast<double>(inter) / static_cast<double>(g.span.length()) < spec.threshold - 1e-9) return false;
    if (spec.pred_ratio && static_cast<double>(inter) / static_cast<double>(p.span.length()) < *spec.pred_ratio - 1e-9)
      return false;
  }
  return ignore_labels || spec.effective(p.label) == spec.effective(g.label);
}

/// Maximum number of one-to-one matches, by trying every assignment.
inline std::size_t exhaustive_matches(const std::vector<Annotation>& pred, const std::vector<Annotation>& gold,
                                      const MatchSpec& spec, bool ignore_labels = false) {
  std::vector<bool> used(pred.size(), false);
  std::size_t best = 0;
  auto go = [&](auto&& self, std::size_t g, std::size_t count) -> void {
    if (count + (gold.size() - g) <= best) return;
    if (g == gold.size()) {
      best = std::max(best, count);
      return;
    }
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (used[p] || !compatible(pred[p], gold[g], spec, ignore_labels)) continue;
      used[p] = true;
      self(self, g + 1, count + 1);
      used[p] = false;
    }
    self(self, g + 1, count);
  };
  go(go, 0, 0);
  return best;
}

}  // namespace deid::oracle
