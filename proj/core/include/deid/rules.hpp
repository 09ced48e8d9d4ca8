#pragma once

// Contextual rule engine: a regular-expression core whose matches are kept
// only when a prefix term ends, and/or a suffix term starts, within a
// character window of the match.

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/regex.hpp>

#include "deid/model.hpp"
#include "deid/text.hpp"

namespace deid {

struct ContextualRule {
  std::string rule_id;
  Label label = Label::Id;
  std::string core;
  std::vector<std::string> prefix_terms;
  std::vector<std::string> suffix_terms;
  /// Maximum characters between the match edge and the nearer edge of a
  /// context term.
  std::size_t context_window = 0;
  /// Maximum characters a matched context term may span (whitespace inside
  /// a term matches any run of whitespace, so the span can exceed the term's
  /// own length). Zero means unlimited.
  std::size_t context_length_limit = 0;
  bool is_phi = true;
  bool icase = false;
  std::string source_class = "rules";
};

/// Compiled, immutable rule collection for one language.
///
/// File format, one rule per line, `#` comments:
///   rule <id> label=<L> core=/.../ prefix=[a,b] suffix=[c,d] window=<n> phi=<bool>
/// plus optional `limit=<n>`, `icase=<bool>` and `class=<source-class>`.
class RuleSet {
 public:
  RuleSet() = default;

  /// Compiles every core pattern. Throws ConfigError naming the rule on an
  /// invalid regex or duplicate id.
  RuleSet(std::vector<ContextualRule> rules, std::string language);

  const std::vector<ContextualRule>& rules() const noexcept { return rules_; }
  const std::string& language() const noexcept { return language_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }

  /// Appends another set's rules (ids must stay unique).
  void extend(const RuleSet& other);

  struct Compiled {
    boost::regex core;
    std::vector<std::u32string> prefix;  // NFC + case-folded, whitespace-collapsed
    std::vector<std::u32string> suffix;
  };
  const std::vector<Compiled>& compiled() const noexcept { return compiled_; }

 private:
  std::vector<ContextualRule> rules_;
  std::vector<Compiled> compiled_;
  std::string language_;
};

RuleSet compile_ruleset(std::string_view content, const std::string& resource_name, std::string language = "en");
RuleSet compile_ruleset_file(const std::string& path, std::string language = "en");

/// Emits one chunk per admissible core match (source = rule id,
/// confidence 1.0), sorted by (start, end, rule id). Rules never suppress
/// one another here.
std::vector<EntityChunk> apply_rules(const Text& text, const RuleSet& ruleset);
std::vector<EntityChunk> apply_rules(const Document& doc, const RuleSet& ruleset);

}  // namespace deid
