#pragma once

// Pluggable entity recognizers. Every recognizer honours one contract:
// chunks align to token boundaries, labels come from the taxonomy, and the
// output is a pure function of (document, tokens, configuration). Overlaps
// between and within recognizers are left to the merge stage, except that a
// gazetteer never emits a match strictly inside a longer match of its own.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <boost/regex.hpp>

#include "deid/model.hpp"
#include "deid/preprocess.hpp"
#include "deid/text.hpp"

namespace deid {

struct RecognizerOutput {
  std::string recognizer_id;
  std::vector<EntityChunk> chunks;
};

class Recognizer {
 public:
  virtual ~Recognizer() = default;

  virtual const std::string& id() const noexcept = 0;
  virtual RecognizerOutput recognize(const Document& doc, const Text& text,
                                     std::span<const Token> tokens) const = 0;
};

/// Role of a gazetteer inside a person-name recognizer.
enum class NameRole { None, First, Last };

/// Dictionary of surface forms for one label.
///
/// File format: a header line `label=<Label>;case_sensitive=<bool>` with
/// optional `max_tokens=<n>`, `class=<source-class>`, `phi=<bool>`,
/// `confidence=<x>` and `role=first|last` fields, then one entry per line.
/// Entries are NFC-normalized (and case-folded unless case-sensitive).
class Gazetteer {
 public:
  static constexpr std::size_t kDefaultMaxTokens = 6;

  Gazetteer(std::string name, Label label, bool case_sensitive = false,
            std::size_t max_entry_tokens = kDefaultMaxTokens);

  static Gazetteer parse(std::string_view content, const std::string& resource_name);
  static Gazetteer load(const std::string& path);

  /// Throws ConfigError if the entry is empty or has too many tokens.
  void add(std::string_view entry);

  bool contains(std::string_view surface) const;
  std::string key(std::string_view surface) const;

  const std::string& name() const noexcept { return name_; }
  Label label() const noexcept { return label_; }
  bool case_sensitive() const noexcept { return case_sensitive_; }
  std::size_t max_entry_tokens() const noexcept { return max_entry_tokens_; }
  std::size_t longest_entry_tokens() const noexcept { return longest_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::string source_class = "ner";
  bool phi = true;
  double confidence = 1.0;
  NameRole role = NameRole::None;

  /// Normalization applied to a single token before lookup.
  std::string normalize(std::string_view token) const;
  bool has_first_token(const std::string& normalized) const { return first_tokens_.count(normalized) != 0; }
  bool has_key(const std::string& key) const { return entries_.count(key) != 0; }

 private:
  std::string name_;
  Label label_;
  bool case_sensitive_;
  std::size_t max_entry_tokens_;
  std::size_t longest_ = 0;
  std::unordered_set<std::string> entries_;
  std::unordered_set<std::string> first_tokens_;
};

/// Greedy longest-match scan: all matching token windows (within one
/// sentence, up to max_entry_tokens) are ranked longest first, then earliest,
/// and accepted unless they overlap an already accepted window.
std::vector<EntityChunk> gazetteer_scan(const Text& text, std::span<const Token> tokens,
                                        const Gazetteer& gazetteer, std::string_view source_id);

class GazetteerRecognizer final : public Recognizer {
 public:
  GazetteerRecognizer(std::string id, std::shared_ptr<const Gazetteer> gazetteer)
      : id_(std::move(id)), gazetteer_(std::move(gazetteer)) {}

  const std::string& id() const noexcept override { return id_; }
  RecognizerOutput recognize(const Document& doc, const Text& text,
                             std::span<const Token> tokens) const override;

 private:
  std::string id_;
  std::shared_ptr<const Gazetteer> gazetteer_;
};

/// Builds person names from first-name and surname gazetteers: a known first
/// name followed by further known first names, single-letter initials or
/// surnames on the same line forms one chunk; a lone known surname is a
/// chunk on its own. Only capitalized tokens qualify.
class PersonNameRecognizer final : public Recognizer {
 public:
  PersonNameRecognizer(std::string id, Label label, std::shared_ptr<const Gazetteer> first_names,
                       std::shared_ptr<const Gazetteer> surnames);

  const std::string& id() const noexcept override { return id_; }
  RecognizerOutput recognize(const Document& doc, const Text& text,
                             std::span<const Token> tokens) const override;

  std::string source_class = "ner";
  double confidence = 1.0;

 private:
  std::string id_;
  Label label_;
  std::shared_ptr<const Gazetteer> first_;
  std::shared_ptr<const Gazetteer> last_;
};

struct PatternDef {
  std::string id;
  Label label = Label::Id;
  std::string regex;
  std::string source_class = "ner";
  double confidence = 1.0;
  bool icase = false;
};

/// Regular-expression recognizer whose matches are kept only when both ends
/// fall on token boundaries.
///
/// File format: `pattern <id> label=<Label> regex=/.../ [class=..]
/// [confidence=..] [icase=<bool>]`, `#` comments.
class PatternRecognizer final : public Recognizer {
 public:
  PatternRecognizer(std::string id, std::vector<PatternDef> patterns);

  static std::vector<PatternDef> parse(std::string_view content, const std::string& resource_name);

  const std::string& id() const noexcept override { return id_; }
  RecognizerOutput recognize(const Document& doc, const Text& text,
                             std::span<const Token> tokens) const override;

  std::size_t size() const noexcept { return patterns_.size(); }

 private:
  std::string id_;
  std::vector<PatternDef> patterns_;
  std::vector<boost::regex> compiled_;
};

}  // namespace deid
