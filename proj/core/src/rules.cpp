#include "deid/rules.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <tuple>

#include "deid/error.hpp"
#include "line_format.hpp"
#include "regex_util.hpp"

namespace deid {
namespace {

std::u32string prepare_term(std::string_view term) {
  const std::u32string raw = to_u32(fold_case(term));
  std::u32string out;
  bool in_space = false;
  for (char32_t c : raw) {
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(U' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

// Without an explicit limit a term may stretch to twice its own length
// through whitespace runs.
std::size_t span_cap(const std::u32string& term, std::size_t limit) {
  return limit > 0 ? limit : 2 * term.size();
}

// End offset of `term` matched at `q`, if any.
std::optional<std::size_t> match_term_at(const std::u32string& s, std::size_t q, const std::u32string& term,
                                         std::size_t cap) {
  if (term.empty()) return std::nullopt;
  if (q > 0 && is_letter(term.front()) && is_letter(s[q - 1])) return std::nullopt;
  std::size_t i = q;
  for (char32_t tc : term) {
    if (tc == U' ') {
      if (i >= s.size() || !is_space(s[i])) return std::nullopt;
      while (i < s.size() && is_space(s[i])) ++i;
    } else {
      if (i >= s.size() || fold_char(s[i]) != tc) return std::nullopt;
      ++i;
    }
    if (i - q > cap) return std::nullopt;
  }
  return i;
}

bool prefix_satisfied(const std::u32string& s, Span m, const std::vector<std::u32string>& terms,
                      const ContextualRule& rule) {
  for (const auto& term : terms) {
    const std::size_t cap = span_cap(term, rule.context_length_limit);
    const std::size_t reach = rule.context_window + cap;
    const std::size_t from = m.start > reach ? m.start - reach : 0;
    for (std::size_t q = from; q < m.start; ++q) {
      const auto end = match_term_at(s, q, term, cap);
      if (end && *end <= m.start && m.start - *end <= rule.context_window) return true;
    }
  }
  return false;
}

bool suffix_satisfied(const std::u32string& s, Span m, const std::vector<std::u32string>& terms,
                      const ContextualRule& rule) {
  for (const auto& term : terms) {
    const std::size_t cap = span_cap(term, rule.context_length_limit);
    const std::size_t to = std::min(s.size(), m.end + rule.context_window);
    for (std::size_t q = m.end; q <= to && q < s.size(); ++q) {
      if (match_term_at(s, q, term, cap)) return true;
    }
  }
  return false;
}

}  // namespace

RuleSet::RuleSet(std::vector<ContextualRule> rules, std::string language)
    : rules_(std::move(rules)), language_(std::move(language)) {
  std::set<std::string> ids;
  compiled_.reserve(rules_.size());
  for (const auto& r : rules_) {
    if (r.rule_id.empty()) throw ConfigError("rule with empty id");
    if (!ids.insert(r.rule_id).second) throw ConfigError("duplicate rule id '" + r.rule_id + "'");
    if (r.core.empty()) throw ConfigError("rule '" + r.rule_id + "' has no core pattern");
    Compiled c;
    c.core = detail::compile_regex(r.core, r.icase, "rule", 0, r.rule_id);
    for (const auto& t : r.prefix_terms) c.prefix.push_back(prepare_term(t));
    for (const auto& t : r.suffix_terms) c.suffix.push_back(prepare_term(t));
    std::erase_if(c.prefix, [](const std::u32string& t) { return t.empty(); });
    std::erase_if(c.suffix, [](const std::u32string& t) { return t.empty(); });
    compiled_.push_back(std::move(c));
  }
}

void RuleSet::extend(const RuleSet& other) {
  std::vector<ContextualRule> all = rules_;
  all.insert(all.end(), other.rules_.begin(), other.rules_.end());
  *this = RuleSet(std::move(all), language_);
}

RuleSet compile_ruleset(std::string_view content, const std::string& resource_name, std::string language) {
  static const std::set<std::string> known = {"label", "core", "prefix", "suffix", "window",
                                              "limit", "phi",   "icase",  "class"};
  std::vector<ContextualRule> rules;
  std::set<std::string> ids;
  for (const auto& line : detail::content_lines(content)) {
    const auto d = detail::parse_directive(line.text, resource_name, line.number);
    if (d.keyword != "rule") throw ConfigError(resource_name, line.number, "expected 'rule', got '" + d.keyword + "'");
    if (!ids.insert(d.id).second) throw ConfigError(resource_name, line.number, "duplicate rule id '" + d.id + "'");
    for (const auto& key : d.order) {
      if (!known.count(key)) throw ConfigError(resource_name, line.number, "unknown key '" + key + "' in rule '" + d.id + "'");
    }
    ContextualRule r;
    r.rule_id = d.id;
    auto scalar = [&](const std::string& k) -> const std::string* {
      auto it = d.scalars.find(k);
      return it == d.scalars.end() ? nullptr : &it->second;
    };
    const auto* label = scalar("label");
    if (!label) throw ConfigError(resource_name, line.number, "rule '" + d.id + "' lacks label=");
    const auto parsed = parse_label(*label);
    if (!parsed) throw ConfigError(resource_name, line.number, "invalid label '" + *label + "' in rule '" + d.id + "'");
    r.label = *parsed;
    const auto* core = scalar("core");
    if (!core || core->empty()) throw ConfigError(resource_name, line.number, "rule '" + d.id + "' lacks core=/.../");
    r.core = *core;
    if (d.scalars.count("prefix") || d.scalars.count("suffix")) {
      throw ConfigError(resource_name, line.number, "prefix/suffix must be [lists] in rule '" + d.id + "'");
    }
    if (auto it = d.lists.find("prefix"); it != d.lists.end()) r.prefix_terms = it->second;
    if (auto it = d.lists.find("suffix"); it != d.lists.end()) r.suffix_terms = it->second;
    if (const auto* w = scalar("window")) {
      const long long v = detail::parse_int(*w, resource_name, line.number);
      if (v < 0) throw ConfigError(resource_name, line.number, "window must be >= 0 in rule '" + d.id + "'");
      r.context_window = static_cast<std::size_t>(v);
    }
    if (const auto* l = scalar("limit")) {
      const long long v = detail::parse_int(*l, resource_name, line.number);
      if (v < 0) throw ConfigError(resource_name, line.number, "limit must be >= 0 in rule '" + d.id + "'");
      r.context_length_limit = static_cast<std::size_t>(v);
    }
    if (const auto* p = scalar("phi")) r.is_phi = detail::parse_bool(*p, resource_name, line.number);
    if (const auto* ic = scalar("icase")) r.icase = detail::parse_bool(*ic, resource_name, line.number);
    if (const auto* c = scalar("class")) r.source_class = *c;
    detail::compile_regex(r.core, r.icase, resource_name, line.number, r.rule_id);
    rules.push_back(std::move(r));
  }
  return RuleSet(std::move(rules), std::move(language));
}

RuleSet compile_ruleset_file(const std::string& path, std::string language) {
  return compile_ruleset(detail::read_file(path), path, std::move(language));
}

std::vector<EntityChunk> apply_rules(const Text& text, const RuleSet& ruleset) {
  std::vector<EntityChunk> out;
  const auto& s = text.chars();
  const auto& rules = ruleset.rules();
  const auto& compiled = ruleset.compiled();
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const auto& rule = rules[k];
    const auto& c = compiled[k];
    detail::for_each_match(c.core, text, [&](Span m) {
      if (!c.prefix.empty() && !prefix_satisfied(s, m, c.prefix, rule)) return;
      if (!c.suffix.empty() && !suffix_satisfied(s, m, c.suffix, rule)) return;
      EntityChunk chunk;
      chunk.span = m;
      chunk.label = rule.label;
      chunk.text = text.slice(m);
      chunk.source = rule.rule_id;
      chunk.source_class = rule.source_class;
      chunk.confidence = 1.0;
      chunk.phi = rule.is_phi && is_phi(rule.label);
      out.push_back(std::move(chunk));
    });
  }
  std::sort(out.begin(), out.end(), [](const EntityChunk& a, const EntityChunk& b) {
    return std::tie(a.span.start, a.span.end, a.source) < std::tie(b.span.start, b.span.end, b.source);
  });
  return out;
}

std::vector<EntityChunk> apply_rules(const Document& doc, const RuleSet& ruleset) {
  return apply_rules(Text(doc.text), ruleset);
}

}  // namespace deid
