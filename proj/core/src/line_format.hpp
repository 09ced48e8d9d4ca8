#pragma once

// Helpers for the line-oriented resource formats (rules, patterns, policies,
// manifests, gazetteer headers). Internal to the core library.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deid/error.hpp"

namespace deid::detail {

struct Line {
  std::size_t number = 0;  // 1-based
  std::string_view text;   // trimmed, comment lines removed
};

std::string_view trim(std::string_view s) noexcept;

/// Splits into trimmed lines, dropping blanks and lines starting with '#'.
std::vector<Line> content_lines(std::string_view content);

bool parse_bool(std::string_view v, const std::string& resource, std::size_t line);
long long parse_int(std::string_view v, const std::string& resource, std::size_t line);
double parse_double(std::string_view v, const std::string& resource, std::size_t line);

/// A directive line: `<keyword> <id> key=value key=value ...`.
/// Values may be bare words, `/regex/` (with `\/` for a literal slash) or
/// `[a, b, c]` lists (with `\,` and `\]` escapes).
struct Directive {
  std::string keyword;
  std::string id;
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;
  std::vector<std::string> order;  // keys in the order they appeared

  bool has(const std::string& key) const { return scalars.count(key) || lists.count(key); }
};

Directive parse_directive(std::string_view line, const std::string& resource, std::size_t line_no);

/// Splits `a;b;c` header fields into key=value pairs.
std::map<std::string, std::string> parse_header_fields(std::string_view header, const std::string& resource,
                                                       std::size_t line_no);

std::string read_file(const std::string& path);

}  // namespace deid::detail
