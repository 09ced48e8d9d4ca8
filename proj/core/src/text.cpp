#include "deid/text.hpp"

#include <algorithm>
#include <cctype>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "deid/error.hpp"

namespace deid {
namespace {

bool is_ascii(std::string_view s) noexcept {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

// Decodes one scalar value at `i`, advancing it. Rejects overlong forms,
// surrogates and truncated sequences.
char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra = 0;
  char32_t c = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1, c = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2, c = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3, c = b0 & 0x07, min = 0x10000;
  } else {
    throw EncodingError("invalid UTF-8 lead byte at offset " + std::to_string(i));
  }
  if (i + extra >= s.size()) {
    throw EncodingError("truncated UTF-8 sequence at offset " + std::to_string(i));
  }
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) throw EncodingError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
    c = (c << 6) | (b & 0x3F);
  }
  if (c < min || c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) {
    throw EncodingError("invalid UTF-8 scalar at offset " + std::to_string(i));
  }
  i += extra + 1;
  return c;
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw Error("ICU NFC normalizer unavailable");
  return *n;
}

}  // namespace

std::u32string to_u32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size();) out.push_back(decode_one(utf8, i));
  return out;
}

std::string to_utf8(std::u32string_view chars) {
  std::string out;
  out.reserve(chars.size());
  for (char32_t c : chars) append_utf8(out, c);
  return out;
}

std::size_t char_length(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8) n += (c & 0xC0) != 0x80;
  return n;
}

std::string nfc(std::string_view utf8) {
  if (is_ascii(utf8)) return std::string(utf8);
  UErrorCode status = U_ZERO_ERROR;
  const auto& norm = nfc_instance();
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString out = norm.normalize(in, status);
  if (U_FAILURE(status)) throw EncodingError("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string fold_case(std::string_view utf8) {
  if (is_ascii(utf8)) {
    std::string s(utf8);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  u = nfc_instance().normalize(u, status);
  if (U_FAILURE(status)) throw EncodingError("NFC normalization failed");
  u.foldCase(U_FOLD_CASE_DEFAULT);
  std::string result;
  u.toUTF8String(result);
  return result;
}

char32_t fold_char(char32_t c) noexcept {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
}

bool is_letter(char32_t c) noexcept {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  return u_isalpha(static_cast<UChar32>(c));
}

bool is_digit(char32_t c) noexcept {
  if (c < 0x80) return c >= '0' && c <= '9';
  return u_isdigit(static_cast<UChar32>(c));
}

bool is_word_char(char32_t c) noexcept {
  if (c < 0x80) return is_letter(c) || is_digit(c);
  const auto cat = U_GET_GC_MASK(static_cast<UChar32>(c));
  return u_isalnum(static_cast<UChar32>(c)) || (cat & U_GC_M_MASK) != 0;
}

bool is_space(char32_t c) noexcept {
  if (c < 0x80) return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

bool is_upper(char32_t c) noexcept {
  if (c < 0x80) return c >= 'A' && c <= 'Z';
  return u_isupper(static_cast<UChar32>(c));
}

bool is_lower(char32_t c) noexcept {
  if (c < 0x80) return c >= 'a' && c <= 'z';
  return u_islower(static_cast<UChar32>(c));
}

char32_t to_upper(char32_t c) noexcept {
  if (c < 0x80) return (c >= 'a' && c <= 'z') ? c - 32 : c;
  return static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
}

char32_t to_lower(char32_t c) noexcept {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

std::string to_upper(std::string_view utf8) {
  std::u32string u = to_u32(utf8);
  for (auto& c : u) c = to_upper(c);
  return to_utf8(u);
}

std::string to_lower(std::string_view utf8) {
  std::u32string u = to_u32(utf8);
  for (auto& c : u) c = to_lower(c);
  return to_utf8(u);
}

Text::Text(std::string utf8) : utf8_(std::move(utf8)) {
  chars_.reserve(utf8_.size());
  offsets_.reserve(utf8_.size() + 1);
  for (std::size_t i = 0; i < utf8_.size();) {
    offsets_.push_back(i);
    chars_.push_back(decode_one(utf8_, i));
  }
  offsets_.push_back(utf8_.size());
}

std::size_t Text::char_offset(std::size_t byte) const {
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), byte);
  if (it == offsets_.end() || *it != byte) {
    throw InternalError("byte offset " + std::to_string(byte) + " is not on a code-point boundary");
  }
  return static_cast<std::size_t>(it - offsets_.begin());
}

std::string Text::slice(Span span) const { return std::string(slice_view(span)); }

std::string_view Text::slice_view(Span span) const {
  if (span.end > size() || span.start > span.end) {
    throw InternalError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                        ") outside text of length " + std::to_string(size()));
  }
  const std::size_t b = offsets_[span.start];
  return std::string_view(utf8_).substr(b, offsets_[span.end] - b);
}

}  // namespace deid
