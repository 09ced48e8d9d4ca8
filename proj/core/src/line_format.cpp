#include "line_format.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace deid::detail {

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::vector<Line> content_lines(std::string_view content) {
  std::vector<Line> out;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    ++number;
    std::string_view line = trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    out.push_back({number, line});
  }
  return out;
}

bool parse_bool(std::string_view v, const std::string& resource, std::size_t line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(resource, line, "expected a boolean, got '" + std::string(v) + "'");
}

long long parse_int(std::string_view v, const std::string& resource, std::size_t line) {
  long long out = 0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && v.front() == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last || first == last) {
    throw ConfigError(resource, line, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view v, const std::string& resource, std::size_t line) {
  std::string s(v);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno != 0) {
    throw ConfigError(resource, line, "expected a number, got '" + s + "'");
  }
  return d;
}

namespace {

std::vector<std::string> split_list(std::string_view body) {
  std::vector<std::string> items;
  std::string cur;
  bool any = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '\\' && i + 1 < body.size() && (body[i + 1] == ',' || body[i + 1] == ']' || body[i + 1] == '\\')) {
      cur.push_back(body[++i]);
      any = true;
    } else if (c == ',') {
      items.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
      any = true;
    }
  }
  if (any || !items.empty()) items.emplace_back(trim(cur));
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  return items;
}

}  // namespace

Directive parse_directive(std::string_view line, const std::string& resource, std::size_t line_no) {
  Directive d;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  };
  auto word = [&] {
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    return std::string(line.substr(b, i - b));
  };
  skip_ws();
  d.keyword = word();
  skip_ws();
  d.id = word();
  if (d.keyword.empty() || d.id.empty() || d.id.find('=') != std::string::npos) {
    throw ConfigError(resource, line_no, "expected '<keyword> <id> key=value ...'");
  }
  while (true) {
    skip_ws();
    if (i >= line.size()) break;
    if (line[i] == '#') break;
    const std::size_t eq = line.find('=', i);
    if (eq == std::string_view::npos) {
      throw ConfigError(resource, line_no, "expected key=value near '" + std::string(line.substr(i)) + "'");
    }
    std::string key(trim(line.substr(i, eq - i)));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw ConfigError(resource, line_no, "malformed key near '" + std::string(line.substr(i)) + "'");
    }
    if (d.has(key)) throw ConfigError(resource, line_no, "duplicate key '" + key + "'");
    i = eq + 1;
    if (i < line.size() && line[i] == '/') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        const char c = line[i];
        if (c == '\\' && i + 1 < line.size() && line[i + 1] == '/') {
          value.push_back('/');
          i += 2;
          continue;
        }
        if (c == '/' && (i + 1 == line.size() || line[i + 1] == ' ' || line[i + 1] == '\t')) {
          closed = true;
          ++i;
          break;
        }
        value.push_back(c);
        ++i;
      }
      if (!closed) throw ConfigError(resource, line_no, "unterminated /regex/ for key '" + key + "'");
      d.scalars[key] = std::move(value);
    } else if (i < line.size() && line[i] == '[') {
      ++i;
      const std::size_t b = i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          i += 2;
          continue;
        }
        if (line[i] == ']') {
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) throw ConfigError(resource, line_no, "unterminated [list] for key '" + key + "'");
      d.lists[key] = split_list(line.substr(b, i - b));
      ++i;
    } else {
      d.scalars[key] = word();
    }
    d.order.push_back(key);
  }
  return d;
}

std::map<std::string, std::string> parse_header_fields(std::string_view header, const std::string& resource,
                                                       std::size_t line_no) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= header.size()) {
    std::size_t semi = header.find(';', pos);
    if (semi == std::string_view::npos) semi = header.size();
    std::string_view field = trim(header.substr(pos, semi - pos));
    pos = semi + 1;
    if (field.empty()) continue;
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(resource, line_no, "header field '" + std::string(field) + "' is not key=value");
    }
    std::string key(trim(field.substr(0, eq)));
    if (out.count(key)) throw ConfigError(resource, line_no, "duplicate header field '" + key + "'");
    out[key] = std::string(trim(field.substr(eq + 1)));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace deid::detail
