#pragma once

// UTF-8 text with a code-point index. All spans in the engine count Unicode
// scalar values, so masks and surrogates line up regardless of script.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "deid/model.hpp"

namespace deid {

/// Decodes UTF-8. Throws EncodingError on malformed input.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view chars);

/// Number of code points in a valid UTF-8 string.
std::size_t char_length(std::string_view utf8);

/// Unicode NFC normalization.
std::string nfc(std::string_view utf8);

/// NFC followed by full Unicode case folding.
std::string fold_case(std::string_view utf8);

/// Simple (1:1) case folding of one code point; offsets are preserved.
char32_t fold_char(char32_t c) noexcept;

bool is_word_char(char32_t c) noexcept;  // letter, digit or combining mark
bool is_letter(char32_t c) noexcept;
bool is_digit(char32_t c) noexcept;
bool is_space(char32_t c) noexcept;
bool is_upper(char32_t c) noexcept;
bool is_lower(char32_t c) noexcept;
char32_t to_upper(char32_t c) noexcept;
char32_t to_lower(char32_t c) noexcept;

std::string to_upper(std::string_view utf8);
std::string to_lower(std::string_view utf8);

/// Immutable document text addressable by code-point spans.
class Text {
 public:
  Text() = default;
  explicit Text(std::string utf8);

  const std::string& utf8() const noexcept { return utf8_; }
  const std::u32string& chars() const noexcept { return chars_; }
  std::size_t size() const noexcept { return chars_.size(); }

  /// Byte offset of code point `cp` (cp == size() gives the byte length).
  std::size_t byte_offset(std::size_t cp) const { return offsets_[cp]; }

  /// Code-point index of a byte offset that lies on a code-point boundary.
  std::size_t char_offset(std::size_t byte) const;

  std::string slice(Span span) const;
  std::string_view slice_view(Span span) const;

 private:
  std::string utf8_;
  std::u32string chars_;
  std::vector<std::size_t> offsets_;  // size() + 1 entries
};

}  // namespace deid
