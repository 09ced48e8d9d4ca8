#pragma once

// Entity-level evaluation: chunk matching under a coverage threshold or
// token overlap, per-label precision/recall/F1 with micro and macro
// averages, and binary PHI scoring.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deid/model.hpp"

namespace deid {

struct Annotation {
  std::string doc_id;
  Span span;
  Label label = Label::Name;

  bool operator==(const Annotation&) const = default;
};
using GoldAnnotation = Annotation;

enum class MatchMode : std::uint8_t { Coverage, TokenOverlap };

struct MatchSpec {
  MatchMode mode = MatchMode::Coverage;
  /// Minimum |pred ∩ gold| / |gold| in coverage mode.
  double threshold = 0.6;
  /// Optional minimum |pred ∩ gold| / |pred|; off when unset.
  std::optional<double> pred_ratio;
  /// External label names accepted when reading annotation files.
  std::map<std::string, Label> label_mapping;
  std::set<Label> excluded_labels;
  /// Compare labels after mapping both sides to the coarse schema.
  bool coarse = false;
  Taxonomy taxonomy;

  /// Throws ConfigError unless thresholds lie in (0, 1].
  void validate() const;

  /// "coverage:<t>", "coverage" or "token".
  static MatchSpec parse_mode(std::string_view s);

  Label effective(Label l) const { return coarse ? taxonomy.to_coarse(l) : l; }
};

/// Whether `pred` may match `gold`, ignoring labels.
bool spans_match(Span pred, Span gold, const MatchSpec& spec);
double coverage(Span pred, Span gold) noexcept;

struct MatchResult {
  /// For every gold index, the matched pred index.
  std::vector<std::optional<std::size_t>> gold_to_pred;
  std::vector<std::optional<std::size_t>> pred_to_gold;
  std::size_t matched = 0;
};

/// One-document matching. Seeds greedily by descending coverage (earlier
/// start first on ties), then grows along augmenting paths so the number of
/// matches is maximal. Labels must agree unless `ignore_labels`.
MatchResult match_chunks(std::span<const Annotation> pred, std::span<const Annotation> gold, const MatchSpec& spec,
                         bool ignore_labels = false);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

/// A zero denominator yields 0 with the matching flag set, never NaN.
struct Score {
  Counts counts;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  static Score from(const Counts& c);
  std::size_t support() const noexcept { return counts.tp + counts.fn; }
};

struct MetricsReport {
  std::map<Label, Score> per_label;
  Score micro;
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  bool macro_undefined = false;  // no label has support
  Score binary;
  std::size_t documents = 0;
};

/// Accumulates documents; aggregation is order-independent.
class Evaluator {
 public:
  explicit Evaluator(MatchSpec spec = {});

  void add_document(std::span<const Annotation> pred, std::span<const Annotation> gold);
  MetricsReport report() const;

  const MatchSpec& spec() const noexcept { return spec_; }

 private:
  MatchSpec spec_;
  std::map<Label, Counts> per_label_;
  Counts binary_;
  std::size_t documents_ = 0;
};

/// Groups by doc_id and evaluates every document present on either side.
MetricsReport compute_metrics(std::span<const Annotation> pred, std::span<const Annotation> gold,
                              const MatchSpec& spec = {});
Score binary_phi_metrics(std::span<const Annotation> pred, std::span<const Annotation> gold,
                         const MatchSpec& spec = {});

/// `doc_id<TAB>start<TAB>end<TAB>label` rows, `#` comments. Labels go
/// through spec.label_mapping first. With `gold`, overlapping spans within a
/// document are rejected.
std::vector<Annotation> parse_annotations(std::string_view content, const std::string& resource_name,
                                          const MatchSpec& spec = {}, bool gold = false);
std::vector<Annotation> load_annotations(const std::string& path, const MatchSpec& spec = {}, bool gold = false);
std::string format_annotations(std::span<const Annotation> annotations);

/// Aligned table followed by machine-readable `metric<TAB>...` lines.
std::string format_report(const MetricsReport& report);

}  // namespace deid
