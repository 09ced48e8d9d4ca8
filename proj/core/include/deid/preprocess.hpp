#pragma once

// Sentence detection and offset-preserving tokenization.

#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deid/model.hpp"
#include "deid/text.hpp"

namespace deid {

struct SentenceSpan {
  Span span;
  std::size_t index = 0;

  bool operator==(const SentenceSpan&) const = default;
};

struct Token {
  Span span;
  std::string text;
  std::size_t sentence_index = 0;

  bool operator==(const Token&) const = default;
};

struct SentenceConfig {
  /// Words that end in a period without ending a sentence ("Dr.", "e.g.").
  /// Compared case-insensitively against the whitespace-delimited word.
  std::set<std::string> abbreviations = {"dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "vs.", "e.g.", "i.e.", "no."};
  /// Break at a newline when the line does not end in terminal punctuation.
  bool split_on_unterminated_newline = true;

  /// Parses an abbreviation list: one entry per line, `#` comments.
  static std::set<std::string> parse_abbreviations(std::string_view content);
};

/// Pluggable sentence segmentation. The shipped implementation is heuristic;
/// a learned detector can be dropped in behind the same interface.
class SentenceDetector {
 public:
  virtual ~SentenceDetector() = default;
  virtual std::vector<SentenceSpan> detect(const Text& text) const = 0;
};

class HeuristicSentenceDetector final : public SentenceDetector {
 public:
  explicit HeuristicSentenceDetector(SentenceConfig config = {}) : config_(std::move(config)) {}

  std::vector<SentenceSpan> detect(const Text& text) const override;

  const SentenceConfig& config() const noexcept { return config_; }

 private:
  SentenceConfig config_;
};

std::vector<SentenceSpan> detect_sentences(const Text& text, const SentenceConfig& config = {});
std::vector<SentenceSpan> detect_sentences(std::string_view text, const SentenceConfig& config = {});

/// Maximal letter/digit runs are tokens; every other non-space character is
/// a single-character token; whitespace yields nothing.
std::vector<Token> tokenize(const SentenceSpan& sentence, const Text& text);

/// Tokens for every sentence, concatenated in document order.
std::vector<Token> tokenize_all(std::span<const SentenceSpan> sentences, const Text& text);

struct Analysis {
  std::vector<SentenceSpan> sentences;
  std::vector<Token> tokens;
};

Analysis analyze(const Text& text, const SentenceDetector& detector);

}  // namespace deid
