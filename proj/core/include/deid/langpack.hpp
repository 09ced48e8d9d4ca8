#pragma once

// Language packs: a directory with a `manifest` file naming every resource
// the engine needs for one language.
//
// Manifest lines (`#` comments):
//   language = en
//   version = 1.0
//   resource.<kind>.<name> = <path relative to the pack>
//   taxonomy.<GranularLabel> = <CoarseLabel>
// Kinds: gazetteer, patterns, rules, abbreviations, titles, dates, vocab, policy.

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "deid/datetime.hpp"
#include "deid/faker.hpp"
#include "deid/merge.hpp"
#include "deid/model.hpp"
#include "deid/preprocess.hpp"
#include "deid/recognize.hpp"
#include "deid/rules.hpp"

namespace deid {

struct PackResource {
  std::string kind;
  std::string name;
  std::filesystem::path path;  // absolute
  std::size_t line = 0;        // manifest line
};

class LanguagePack {
 public:
  static constexpr const char* kManifestName = "manifest";

  /// Loads and validates every resource. Throws PackError listing all
  /// problems found, not only the first.
  static LanguagePack load(const std::filesystem::path& dir);

  const std::string& language() const noexcept { return language_; }
  const std::string& version() const noexcept { return version_; }
  const std::filesystem::path& root() const noexcept { return root_; }
  const std::vector<PackResource>& resources() const noexcept { return resources_; }

  const std::vector<std::shared_ptr<const Gazetteer>>& gazetteers() const noexcept { return gazetteers_; }
  const RuleSet& rules() const noexcept { return rules_; }
  const SentenceConfig& sentence_config() const noexcept { return sentences_; }
  const DateLocale& dates() const noexcept { return dates_; }
  const Faker& faker() const noexcept { return faker_; }
  const MergePolicy& policy() const noexcept { return policy_; }
  const Taxonomy& taxonomy() const noexcept { return taxonomy_; }

  /// Fresh recognizer instances: one per plain gazetteer, one person-name
  /// recognizer per first/last gazetteer pair, one per pattern file.
  std::vector<std::unique_ptr<Recognizer>> make_recognizers() const;

  /// Source classes emitted by this pack's recognizers and rules.
  std::set<std::string> source_classes() const;

  /// Hash of the manifest and every resource's bytes.
  const std::string& content_hash() const noexcept { return content_hash_; }

  bool operator==(const LanguagePack& o) const noexcept {
    return language_ == o.language_ && version_ == o.version_ && content_hash_ == o.content_hash_;
  }

 private:
  std::string language_;
  std::string version_;
  std::filesystem::path root_;
  std::vector<PackResource> resources_;
  std::vector<std::shared_ptr<const Gazetteer>> gazetteers_;
  std::vector<std::string> gazetteer_ids_;  // manifest names, parallel to gazetteers_
  std::vector<std::pair<std::string, std::vector<PatternDef>>> patterns_;
  RuleSet rules_;
  SentenceConfig sentences_;
  DateLocale dates_;
  Faker faker_;
  MergePolicy policy_;
  Taxonomy taxonomy_;
  std::string content_hash_;
};

/// Sorted names of subdirectories that contain a manifest.
std::vector<std::string> list_supported(const std::filesystem::path& packs_dir);

/// Packs directory compiled into the build (overridable on the CLI).
std::filesystem::path default_packs_dir();

}  // namespace deid
