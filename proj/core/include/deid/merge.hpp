#pragma once

// Chunk merger: resolves overlapping detections from every recognizer and
// rule into one non-overlapping set, driven by a (source-class, label)
// priority table. Losers are dropped whole, never trimmed.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deid/model.hpp"
#include "deid/recognize.hpp"

namespace deid {

enum class TieBreak { LongerSpan, HigherConfidence, EarlierStart, LexicographicSource };

std::string_view tie_break_name(TieBreak t) noexcept;

/// Priority table. Lookup order: exact (class, label), then (class, *),
/// then (*, label), then the default.
///
/// File format:
///   priority <source-class|*> <Label|*> <int>
///   default <int>
///   tiebreak longer-span,higher-confidence,earlier-start,lexicographic-source
class MergePolicy {
 public:
  static const std::vector<TieBreak>& default_tie_break();

  void set_priority(const std::string& source_class, std::optional<Label> label, int priority);
  void set_default(int priority) { default_ = priority; }
  void set_tie_break(std::vector<TieBreak> order);

  std::optional<int> lookup(std::string_view source_class, Label label) const;
  bool has_default() const noexcept { return default_.has_value(); }

  /// Throws ConfigError when nothing in the table resolves the chunk.
  int priority(const EntityChunk& chunk) const;

  /// Throws ConfigError listing every (class, label) pair that cannot be
  /// resolved for the given source classes.
  void validate(const std::set<std::string>& source_classes) const;

  const std::vector<TieBreak>& tie_break() const noexcept { return tie_break_; }

  static MergePolicy parse(std::string_view content, const std::string& resource_name);
  static MergePolicy load(const std::string& path);

 private:
  std::map<std::pair<std::string, std::optional<Label>>, int> table_;
  std::optional<int> default_;
  std::vector<TieBreak> tie_break_ = default_tie_break();
};

struct MergedChunks {
  /// Surviving PHI chunks, non-overlapping, sorted by start.
  std::vector<EntityChunk> chunks;
  /// Surviving non-PHI chunks (e.g. Disease). They win overlaps like any
  /// other chunk but are never rewritten.
  std::vector<EntityChunk> suppressors;
};

/// True when `a` beats `b`: higher priority, then the tie-break criteria,
/// then a fixed total order on (start, end, source, label, class).
bool outranks(const EntityChunk& a, const EntityChunk& b, const MergePolicy& policy);

MergedChunks merge(std::span<const EntityChunk> chunks, const MergePolicy& policy);
MergedChunks merge(std::span<const RecognizerOutput> outputs, std::span<const EntityChunk> rule_chunks,
                   const MergePolicy& policy);

}  // namespace deid
