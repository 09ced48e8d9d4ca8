#include "deid/recognize.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "deid/error.hpp"
#include "line_format.hpp"
#include "regex_util.hpp"

namespace deid {
namespace {

bool capitalized(const Token& t) {
  const std::u32string u = to_u32(t.text);
  return !u.empty() && is_upper(u.front());
}

bool same_line_gap(const Text& text, const Token& a, const Token& b) {
  if (a.sentence_index != b.sentence_index) return false;
  if (b.span.start == a.span.end) return false;
  for (std::size_t i = a.span.end; i < b.span.start; ++i) {
    if (text.chars()[i] == U'\n') return false;
  }
  return true;
}

EntityChunk make_chunk(const Text& text, Span span, Label label, std::string_view source,
                       const std::string& source_class, double confidence, bool phi) {
  EntityChunk c;
  c.span = span;
  c.label = label;
  c.text = text.slice(span);
  c.source = std::string(source);
  c.source_class = source_class;
  c.confidence = confidence;
  c.phi = phi && is_phi(label);
  return c;
}

}  // namespace

Gazetteer::Gazetteer(std::string name, Label label, bool case_sensitive, std::size_t max_entry_tokens)
    : phi(is_phi(label)),
      name_(std::move(name)),
      label_(label),
      case_sensitive_(case_sensitive),
      max_entry_tokens_(max_entry_tokens) {
  if (max_entry_tokens_ == 0) throw ConfigError(name_, 0, "max_tokens must be at least 1");
}

std::string Gazetteer::normalize(std::string_view token) const {
  return case_sensitive_ ? nfc(token) : fold_case(token);
}

std::string Gazetteer::key(std::string_view surface) const {
  const Text t{std::string(surface)};
  const auto tokens = tokenize(SentenceSpan{Span{0, t.size()}, 0}, t);
  std::string k;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    k += normalize(tokens[i].text);
    if (i + 1 < tokens.size() && tokens[i + 1].span.start > tokens[i].span.end) k += ' ';
  }
  return k;
}

void Gazetteer::add(std::string_view entry) {
  const Text t{std::string(entry)};
  const auto tokens = tokenize(SentenceSpan{Span{0, t.size()}, 0}, t);
  if (tokens.empty()) throw ConfigError(name_, 0, "empty gazetteer entry");
  if (tokens.size() > max_entry_tokens_) {
    throw ConfigError(name_, 0, "entry '" + std::string(entry) + "' has " + std::to_string(tokens.size()) +
                                    " tokens, more than max_tokens=" + std::to_string(max_entry_tokens_));
  }
  std::string k;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    k += normalize(tokens[i].text);
    if (i + 1 < tokens.size() && tokens[i + 1].span.start > tokens[i].span.end) k += ' ';
  }
  entries_.insert(std::move(k));
  first_tokens_.insert(normalize(tokens.front().text));
  longest_ = std::max(longest_, tokens.size());
}

bool Gazetteer::contains(std::string_view surface) const { return entries_.count(key(surface)) != 0; }

Gazetteer Gazetteer::parse(std::string_view content, const std::string& resource_name) {
  const auto lines = detail::content_lines(content);
  if (lines.empty()) throw ConfigError(resource_name, 0, "missing gazetteer header line");
  const auto& header = lines.front();
  const auto fields = detail::parse_header_fields(header.text, resource_name, header.number);

  auto field = [&](const std::string& k) -> const std::string* {
    auto it = fields.find(k);
    return it == fields.end() ? nullptr : &it->second;
  };
  static const std::set<std::string> known = {"label", "case_sensitive", "max_tokens", "class", "phi", "confidence", "role"};
  for (const auto& [k, v] : fields) {
    if (!known.count(k)) throw ConfigError(resource_name, header.number, "unknown header field '" + k + "'");
  }
  const std::string* label_s = field("label");
  if (label_s == nullptr) throw ConfigError(resource_name, header.number, "header lacks label=<Label>");
  const auto label = parse_label(*label_s);
  if (!label) throw ConfigError(resource_name, header.number, "invalid label '" + *label_s + "'");
  const std::string* cs = field("case_sensitive");
  if (cs == nullptr) throw ConfigError(resource_name, header.number, "header lacks case_sensitive=<bool>");

  std::size_t max_tokens = kDefaultMaxTokens;
  if (const auto* m = field("max_tokens")) {
    const long long v = detail::parse_int(*m, resource_name, header.number);
    if (v < 1) throw ConfigError(resource_name, header.number, "max_tokens must be at least 1");
    max_tokens = static_cast<std::size_t>(v);
  }
  Gazetteer g(resource_name, *label, detail::parse_bool(*cs, resource_name, header.number), max_tokens);
  if (const auto* c = field("class")) g.source_class = *c;
  if (const auto* p = field("phi")) g.phi = detail::parse_bool(*p, resource_name, header.number) && is_phi(*label);
  if (const auto* c = field("confidence")) {
    g.confidence = detail::parse_double(*c, resource_name, header.number);
    if (g.confidence < 0.0 || g.confidence > 1.0) throw ConfigError(resource_name, header.number, "confidence outside [0,1]");
  }
  if (const auto* r = field("role")) {
    if (*r == "first") g.role = NameRole::First;
    else if (*r == "last") g.role = NameRole::Last;
    else throw ConfigError(resource_name, header.number, "role must be 'first' or 'last'");
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    try {
      g.add(lines[i].text);
    } catch (const ConfigError& e) {
      throw ConfigError(resource_name, lines[i].number, e.what());
    }
  }
  if (g.size() == 0) throw ConfigError(resource_name, 0, "gazetteer has no entries");
  return g;
}

Gazetteer Gazetteer::load(const std::string& path) { return parse(detail::read_file(path), path); }

std::vector<EntityChunk> gazetteer_scan(const Text& text, std::span<const Token> tokens,
                                        const Gazetteer& gazetteer, std::string_view source_id) {
  const std::size_t n = tokens.size();
  std::vector<std::string> norm(n);
  for (std::size_t i = 0; i < n; ++i) norm[i] = gazetteer.normalize(tokens[i].text);

  struct Candidate {
    std::size_t first;
    std::size_t count;
  };
  std::vector<Candidate> candidates;
  const std::size_t max_len = std::min(gazetteer.max_entry_tokens(), gazetteer.longest_entry_tokens());
  for (std::size_t i = 0; i < n; ++i) {
    if (!gazetteer.has_first_token(norm[i])) continue;
    std::string key;
    for (std::size_t len = 1; len <= max_len && i + len <= n; ++len) {
      const std::size_t j = i + len - 1;
      if (tokens[j].sentence_index != tokens[i].sentence_index) break;
      if (len > 1 && tokens[j].span.start > tokens[j - 1].span.end) key += ' ';
      key += norm[j];
      if (gazetteer.has_key(key)) candidates.push_back({i, len});
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.count != b.count ? a.count > b.count : a.first < b.first;
  });
  std::vector<bool> used(n, false);
  std::vector<Candidate> accepted;
  for (const auto& c : candidates) {
    bool free = true;
    for (std::size_t k = c.first; k < c.first + c.count; ++k) free = free && !used[k];
    if (!free) continue;
    for (std::size_t k = c.first; k < c.first + c.count; ++k) used[k] = true;
    accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(), [](const Candidate& a, const Candidate& b) { return a.first < b.first; });

  std::vector<EntityChunk> out;
  out.reserve(accepted.size());
  for (const auto& c : accepted) {
    const Span span{tokens[c.first].span.start, tokens[c.first + c.count - 1].span.end};
    out.push_back(make_chunk(text, span, gazetteer.label(), source_id, gazetteer.source_class,
                             gazetteer.confidence, gazetteer.phi));
  }
  return out;
}

RecognizerOutput GazetteerRecognizer::recognize(const Document&, const Text& text,
                                                std::span<const Token> tokens) const {
  return {id_, gazetteer_scan(text, tokens, *gazetteer_, id_)};
}

PersonNameRecognizer::PersonNameRecognizer(std::string id, Label label, std::shared_ptr<const Gazetteer> first_names,
                                           std::shared_ptr<const Gazetteer> surnames)
    : id_(std::move(id)), label_(label), first_(std::move(first_names)), last_(std::move(surnames)) {
  if (!first_ && !last_) throw ConfigError(id_, 0, "person-name recognizer needs at least one name list");
}

RecognizerOutput PersonNameRecognizer::recognize(const Document&, const Text& text,
                                                 std::span<const Token> tokens) const {
  RecognizerOutput out{id_, {}};
  const std::size_t n = tokens.size();
  auto is_first = [&](std::size_t i) {
    return first_ && capitalized(tokens[i]) && first_->has_key(first_->normalize(tokens[i].text));
  };
  auto is_last = [&](std::size_t i) {
    return last_ && capitalized(tokens[i]) && last_->has_key(last_->normalize(tokens[i].text));
  };
  auto is_initial = [&](std::size_t i) {
    // "J" "." followed on the same line by a known name.
    return i + 2 < n && char_length(tokens[i].text) == 1 && capitalized(tokens[i]) && tokens[i + 1].text == "." &&
           tokens[i + 1].span.start == tokens[i].span.end && same_line_gap(text, tokens[i + 1], tokens[i + 2]) &&
           (is_first(i + 2) || is_last(i + 2));
  };

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    if (is_first(i)) {
      j = i + 1;
      while (j < n && same_line_gap(text, tokens[j - 1], tokens[j])) {
        if (is_first(j) || is_last(j)) {
          ++j;
        } else if (is_initial(j)) {
          j += 2;
        } else {
          break;
        }
      }
    } else if (is_last(i)) {
      j = i + 1;
      while (j < n && same_line_gap(text, tokens[j - 1], tokens[j]) && is_last(j)) ++j;
    }
    if (j == i) {
      ++i;
      continue;
    }
    const Span span{tokens[i].span.start, tokens[j - 1].span.end};
    out.chunks.push_back(make_chunk(text, span, label_, id_, source_class, confidence, true));
    i = j;
  }
  return out;
}

PatternRecognizer::PatternRecognizer(std::string id, std::vector<PatternDef> patterns)
    : id_(std::move(id)), patterns_(std::move(patterns)) {
  compiled_.reserve(patterns_.size());
  for (const auto& p : patterns_) compiled_.push_back(detail::compile_regex(p.regex, p.icase, id_, 0, p.id));
}

std::vector<PatternDef> PatternRecognizer::parse(std::string_view content, const std::string& resource_name) {
  std::vector<PatternDef> out;
  std::set<std::string> ids;
  for (const auto& line : detail::content_lines(content)) {
    const auto d = detail::parse_directive(line.text, resource_name, line.number);
    if (d.keyword != "pattern") throw ConfigError(resource_name, line.number, "expected 'pattern', got '" + d.keyword + "'");
    if (!ids.insert(d.id).second) throw ConfigError(resource_name, line.number, "duplicate pattern id '" + d.id + "'");
    PatternDef p;
    p.id = d.id;
    for (const auto& key : d.order) {
      static const std::set<std::string> known = {"label", "regex", "class", "confidence", "icase"};
      if (!known.count(key)) throw ConfigError(resource_name, line.number, "unknown key '" + key + "'");
    }
    auto label_it = d.scalars.find("label");
    if (label_it == d.scalars.end()) throw ConfigError(resource_name, line.number, "pattern '" + d.id + "' lacks label=");
    const auto label = parse_label(label_it->second);
    if (!label) throw ConfigError(resource_name, line.number, "invalid label '" + label_it->second + "'");
    p.label = *label;
    auto re = d.scalars.find("regex");
    if (re == d.scalars.end() || re->second.empty()) throw ConfigError(resource_name, line.number, "pattern '" + d.id + "' lacks regex=/.../");
    p.regex = re->second;
    if (auto it = d.scalars.find("class"); it != d.scalars.end()) p.source_class = it->second;
    if (auto it = d.scalars.find("confidence"); it != d.scalars.end()) p.confidence = detail::parse_double(it->second, resource_name, line.number);
    if (auto it = d.scalars.find("icase"); it != d.scalars.end()) p.icase = detail::parse_bool(it->second, resource_name, line.number);
    detail::compile_regex(p.regex, p.icase, resource_name, line.number, p.id);
    out.push_back(std::move(p));
  }
  return out;
}

RecognizerOutput PatternRecognizer::recognize(const Document&, const Text& text, std::span<const Token> tokens) const {
  RecognizerOutput out{id_, {}};
  std::vector<char> starts(text.size() + 1, 0);
  std::vector<char> ends(text.size() + 1, 0);
  for (const auto& t : tokens) {
    starts[t.span.start] = 1;
    ends[t.span.end] = 1;
  }
  for (std::size_t k = 0; k < patterns_.size(); ++k) {
    const auto& p = patterns_[k];
    detail::for_each_match(compiled_[k], text, [&](Span span) {
      if (!starts[span.start] || !ends[span.end]) return;
      out.chunks.push_back(make_chunk(text, span, p.label, id_, p.source_class, p.confidence, true));
    });
  }
  std::sort(out.chunks.begin(), out.chunks.end(), [](const EntityChunk& a, const EntityChunk& b) {
    return std::tie(a.span, a.source) < std::tie(b.span, b.source);
  });
  return out;
}

}  // namespace deid
