#pragma once

// End-to-end processing of one document:
// preprocess → recognize → rules → merge → rewrite.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deid/datetime.hpp"
#include "deid/eval.hpp"
#include "deid/faker.hpp"
#include "deid/langpack.hpp"
#include "deid/merge.hpp"
#include "deid/preprocess.hpp"
#include "deid/recognize.hpp"
#include "deid/rewrite.hpp"

namespace deid {

struct PipelineOptions {
  RewritePolicy rewrite;
  bool use_recognizers = true;
  bool use_rules = true;
  /// Replaces the pack's merge policy.
  std::optional<MergePolicy> merge_policy;
  DayShiftPolicy day_shift;
  /// Mandatory for obfuscation.
  std::optional<std::uint64_t> seed;
  AgeGroupTable age_groups;
  std::optional<std::string> canonical_date_format;
  UserDictionary dictionary;
};

/// Consistency scope of a document: "patient:<id>", or "doc:<id>" when the
/// patient is unknown.
std::string patient_key(const Document& doc);

class Pipeline {
 public:
  /// Throws ConfigError on inconsistent options (e.g. obfuscation without a seed).
  Pipeline(std::shared_ptr<const LanguagePack> pack, PipelineOptions options = {});

  struct Detection {
    Analysis analysis;
    std::vector<RecognizerOutput> recognized;
    std::vector<EntityChunk> rule_chunks;
    MergedChunks merged;
  };

  struct Result {
    Detection detection;
    RewriteResult rewritten;
  };

  Detection detect(const Document& doc) const;
  Result process(const Document& doc, PatientContext& ctx) const;
  /// One-off processing with a fresh context for the document's patient.
  Result process(const Document& doc) const;

  /// Fresh context for a patient key: seed, day shift and age table applied.
  /// Fixed shifts are looked up by the bare patient id.
  PatientContext context_for(const std::string& patient_key) const;

  static std::vector<Annotation> annotations(const std::string& doc_id, const MergedChunks& merged);

  const LanguagePack& pack() const noexcept { return *pack_; }
  const PipelineOptions& options() const noexcept { return options_; }
  const DateLocale& dates() const noexcept { return dates_; }
  const Faker& faker() const noexcept { return faker_; }

 private:
  std::shared_ptr<const LanguagePack> pack_;
  PipelineOptions options_;
  HeuristicSentenceDetector detector_;
  std::vector<std::unique_ptr<Recognizer>> recognizers_;
  MergePolicy policy_;
  DateLocale dates_;
  Faker faker_;
};

}  // namespace deid
