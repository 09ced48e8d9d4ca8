#include "deid/preprocess.hpp"

#include <algorithm>

namespace deid {
namespace {

bool is_terminal(char32_t c) noexcept { return c == U'.' || c == U'!' || c == U'?'; }

bool is_closer(char32_t c) noexcept {
  switch (c) {
    case U'"': case U'\'': case U')': case U']':
    case U'»': case U'”': case U'’':
      return true;
    default:
      return false;
  }
}

bool is_line_space(char32_t c) noexcept { return c != U'\n' && is_space(c); }

// The whitespace-delimited word ending at `end` (exclusive), case-folded.
std::string word_before(const std::u32string& chars, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && !is_space(chars[b - 1])) --b;
  std::u32string w = chars.substr(b, end - b);
  for (auto& c : w) c = fold_char(c);
  return to_utf8(w);
}

}  // namespace

std::set<std::string> SentenceConfig::parse_abbreviations(std::string_view content) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    out.insert(fold_case(line));
  }
  return out;
}

std::vector<SentenceSpan> HeuristicSentenceDetector::detect(const Text& text) const {
  const std::u32string& s = text.chars();
  const std::size_t n = s.size();
  std::vector<std::size_t> cuts;

  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = s[i];
    if (is_terminal(c)) {
      std::size_t j = i + 1;
      while (j < n && (is_closer(s[j]) || is_terminal(s[j]))) ++j;
      if (j >= n || !is_space(s[j])) continue;
      std::size_t k = j;
      while (k < n && is_space(s[k])) ++k;
      if (k >= n || !is_upper(s[k])) continue;
      if (c == U'.') {
        const std::string word = word_before(s, i + 1);
        if (config_.abbreviations.count(word) != 0) continue;
        // Initials such as "J." inside a name.
        if (char_length(word) == 2 && is_letter(s[i - 1])) continue;
      }
      cuts.push_back(j);
      i = j - 1;
    } else if (c == U'\n') {
      std::size_t k = i + 1;
      while (k < n && is_line_space(s[k])) ++k;
      const bool blank_follows = k < n && s[k] == U'\n';
      std::size_t b = i;
      while (b > 0 && is_line_space(s[b - 1])) --b;
      const bool line_empty = b == 0 || s[b - 1] == U'\n';
      if (line_empty) continue;
      std::size_t last = b - 1;
      while (last > 0 && is_closer(s[last])) --last;
      const bool terminated = is_terminal(s[last]);
      if (blank_follows || (config_.split_on_unterminated_newline && !terminated)) cuts.push_back(i);
    }
  }
  cuts.push_back(n);

  std::vector<SentenceSpan> out;
  std::size_t from = 0;
  for (std::size_t cut : cuts) {
    std::size_t a = from;
    std::size_t b = cut;
    while (a < b && is_space(s[a])) ++a;
    while (b > a && is_space(s[b - 1])) --b;
    if (a < b) out.push_back({Span{a, b}, out.size()});
    from = cut;
  }
  return out;
}

std::vector<SentenceSpan> detect_sentences(const Text& text, const SentenceConfig& config) {
  return HeuristicSentenceDetector(config).detect(text);
}

std::vector<SentenceSpan> detect_sentences(std::string_view text, const SentenceConfig& config) {
  return detect_sentences(Text(std::string(text)), config);
}

std::vector<Token> tokenize(const SentenceSpan& sentence, const Text& text) {
  const std::u32string& s = text.chars();
  std::vector<Token> out;
  const std::size_t end = std::min(sentence.span.end, s.size());
  std::size_t i = sentence.span.start;
  while (i < end) {
    if (is_space(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word_char(s[i])) {
      while (j < end && is_word_char(s[j])) ++j;
    }
    const Span span{i, j};
    out.push_back({span, text.slice(span), sentence.index});
    i = j;
  }
  return out;
}

std::vector<Token> tokenize_all(std::span<const SentenceSpan> sentences, const Text& text) {
  std::vector<Token> out;
  for (const auto& sentence : sentences) {
    auto tokens = tokenize(sentence, text);
    out.insert(out.end(), std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end()));
  }
  return out;
}

Analysis analyze(const Text& text, const SentenceDetector& detector) {
  Analysis a;
  a.sentences = detector.detect(text);
  a.tokens = tokenize_all(a.sentences, text);
  return a;
}

}  // namespace deid
