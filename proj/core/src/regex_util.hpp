#pragma once

#include <string>

#include <boost/regex.hpp>

#include "deid/error.hpp"
#include "deid/text.hpp"

namespace deid::detail {

inline boost::regex compile_regex(const std::string& pattern, bool icase, const std::string& resource,
                                  std::size_t line, const std::string& owner) {
  try {
    boost::regex::flag_type flags = boost::regex::perl;
    if (icase) flags |= boost::regex::icase;
    return boost::regex(pattern, flags);
  } catch (const boost::regex_error& e) {
    throw ConfigError(resource, line, "invalid regex in '" + owner + "': " + e.what());
  }
}

inline bool on_char_boundary(const std::string& utf8, std::size_t byte) noexcept {
  return byte >= utf8.size() || (static_cast<unsigned char>(utf8[byte]) & 0xC0) != 0x80;
}

/// Calls `f(Span)` for every non-empty match, in code-point offsets. Matches
/// that split a multi-byte character are skipped.
template <typename F>
void for_each_match(const boost::regex& re, const Text& text, F&& f) {
  const std::string& s = text.utf8();
  auto it = boost::sregex_iterator(s.begin(), s.end(), re, boost::match_not_null);
  const auto end = boost::sregex_iterator();
  for (; it != end; ++it) {
    const auto& m = *it;
    const auto b = static_cast<std::size_t>(m.position(std::size_t{0}));
    const auto e = b + static_cast<std::size_t>(m.length(std::size_t{0}));
    if (b == e || !on_char_boundary(s, b) || !on_char_boundary(s, e)) continue;
    f(Span{text.char_offset(b), text.char_offset(e)});
  }
}

}  // namespace deid::detail
