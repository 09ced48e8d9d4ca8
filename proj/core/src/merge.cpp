#include "deid/merge.hpp"

#include <algorithm>
#include <tuple>

#include "deid/error.hpp"
#include "line_format.hpp"

namespace deid {
namespace {

std::optional<TieBreak> parse_tie_break(std::string_view s) {
  if (s == "longer-span") return TieBreak::LongerSpan;
  if (s == "higher-confidence") return TieBreak::HigherConfidence;
  if (s == "earlier-start") return TieBreak::EarlierStart;
  if (s == "lexicographic-source") return TieBreak::LexicographicSource;
  return std::nullopt;
}

// Negative when a wins, positive when b wins, zero on a tie.
int compare_by(TieBreak t, const EntityChunk& a, const EntityChunk& b) {
  switch (t) {
    case TieBreak::LongerSpan:
      return a.span.length() == b.span.length() ? 0 : (a.span.length() > b.span.length() ? -1 : 1);
    case TieBreak::HigherConfidence:
      return a.confidence == b.confidence ? 0 : (a.confidence > b.confidence ? -1 : 1);
    case TieBreak::EarlierStart:
      return a.span.start == b.span.start ? 0 : (a.span.start < b.span.start ? -1 : 1);
    case TieBreak::LexicographicSource:
      return a.source == b.source ? 0 : (a.source < b.source ? -1 : 1);
  }
  return 0;
}

}  // namespace

std::string_view tie_break_name(TieBreak t) noexcept {
  switch (t) {
    case TieBreak::LongerSpan: return "longer-span";
    case TieBreak::HigherConfidence: return "higher-confidence";
    case TieBreak::EarlierStart: return "earlier-start";
    case TieBreak::LexicographicSource: return "lexicographic-source";
  }
  return "?";
}

const std::vector<TieBreak>& MergePolicy::default_tie_break() {
  static const std::vector<TieBreak> order = {TieBreak::LongerSpan, TieBreak::HigherConfidence,
                                              TieBreak::EarlierStart, TieBreak::LexicographicSource};
  return order;
}

void MergePolicy::set_priority(const std::string& source_class, std::optional<Label> label, int priority) {
  table_[{source_class, label}] = priority;
}

void MergePolicy::set_tie_break(std::vector<TieBreak> order) {
  std::set<TieBreak> seen(order.begin(), order.end());
  if (seen.size() != order.size()) throw ConfigError("tiebreak lists a criterion twice");
  tie_break_ = std::move(order);
}

std::optional<int> MergePolicy::lookup(std::string_view source_class, Label label) const {
  const std::string cls(source_class);
  if (auto it = table_.find({cls, label}); it != table_.end()) return it->second;
  if (auto it = table_.find({cls, std::nullopt}); it != table_.end()) return it->second;
  if (auto it = table_.find({"*", label}); it != table_.end()) return it->second;
  return default_;
}

int MergePolicy::priority(const EntityChunk& chunk) const {
  if (auto p = lookup(chunk.source_class, chunk.label)) return *p;
  throw ConfigError("merge policy has no priority for source class '" + chunk.source_class + "' and label '" +
                    std::string(label_name(chunk.label)) + "' and no default");
}

void MergePolicy::validate(const std::set<std::string>& source_classes) const {
  if (default_) return;
  std::vector<std::string> missing;
  for (const auto& cls : source_classes) {
    for (std::size_t i = 0; i < kLabelCount; ++i) {
      const auto label = static_cast<Label>(i);
      if (!lookup(cls, label)) missing.push_back(cls + "/" + std::string(label_name(label)));
    }
  }
  if (!missing.empty()) {
    std::string msg = "merge policy cannot resolve " + std::to_string(missing.size()) + " (class, label) pair(s):";
    for (std::size_t i = 0; i < missing.size() && i < 8; ++i) msg += " " + missing[i];
    if (missing.size() > 8) msg += " ...";
    throw ConfigError(msg);
  }
}

MergePolicy MergePolicy::parse(std::string_view content, const std::string& resource_name) {
  MergePolicy policy;
  for (const auto& line : detail::content_lines(content)) {
    std::vector<std::string_view> words;
    std::string_view rest = line.text;
    while (!rest.empty()) {
      const std::size_t sp = rest.find_first_of(" \t");
      words.push_back(rest.substr(0, sp));
      if (sp == std::string_view::npos) break;
      rest = detail::trim(rest.substr(sp));
    }
    if (words[0] == "priority") {
      if (words.size() != 4) throw ConfigError(resource_name, line.number, "expected 'priority <class> <label> <int>'");
      std::optional<Label> label;
      if (words[2] != "*") {
        label = parse_label(words[2]);
        if (!label) throw ConfigError(resource_name, line.number, "invalid label '" + std::string(words[2]) + "'");
      }
      policy.set_priority(std::string(words[1]), label, static_cast<int>(detail::parse_int(words[3], resource_name, line.number)));
    } else if (words[0] == "default") {
      if (words.size() != 2) throw ConfigError(resource_name, line.number, "expected 'default <int>'");
      policy.set_default(static_cast<int>(detail::parse_int(words[1], resource_name, line.number)));
    } else if (words[0] == "tiebreak") {
      if (words.size() != 2) throw ConfigError(resource_name, line.number, "expected 'tiebreak a,b,...'");
      std::vector<TieBreak> order;
      std::string_view list = words[1];
      while (!list.empty()) {
        const std::size_t comma = list.find(',');
        const auto name = detail::trim(list.substr(0, comma));
        const auto t = parse_tie_break(name);
        if (!t) throw ConfigError(resource_name, line.number, "unknown tie-break '" + std::string(name) + "'");
        order.push_back(*t);
        if (comma == std::string_view::npos) break;
        list = list.substr(comma + 1);
      }
      try {
        policy.set_tie_break(std::move(order));
      } catch (const ConfigError& e) {
        throw ConfigError(resource_name, line.number, e.what());
      }
    } else {
      throw ConfigError(resource_name, line.number, "unknown directive '" + std::string(words[0]) + "'");
    }
  }
  return policy;
}

MergePolicy MergePolicy::load(const std::string& path) { return parse(detail::read_file(path), path); }

bool outranks(const EntityChunk& a, const EntityChunk& b, const MergePolicy& policy) {
  const int pa = policy.priority(a);
  const int pb = policy.priority(b);
  if (pa != pb) return pa > pb;
  for (TieBreak t : policy.tie_break()) {
    const int c = compare_by(t, a, b);
    if (c != 0) return c < 0;
  }
  return std::tie(a.span.start, a.span.end, a.source, a.label, a.source_class, a.confidence) <
         std::tie(b.span.start, b.span.end, b.source, b.label, b.source_class, b.confidence);
}

MergedChunks merge(std::span<const EntityChunk> chunks, const MergePolicy& policy) {
  struct Ranked {
    const EntityChunk* chunk;
    int priority;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(chunks.size());
  for (const auto& c : chunks) {
    if (c.span.empty()) throw InternalError("empty chunk span from source '" + c.source + "'");
    ranked.push_back({&c, policy.priority(c)});
  }
  std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return outranks(*a.chunk, *b.chunk, policy);
  });

  // Accepted spans keyed by start; non-overlapping by construction.
  std::map<std::size_t, std::size_t> taken;
  auto overlaps_taken = [&](Span s) {
    auto it = taken.lower_bound(s.end);
    if (it == taken.begin()) return false;
    --it;
    return it->second > s.start;
  };

  MergedChunks out;
  const EntityChunk* previous = nullptr;
  for (const auto& r : ranked) {
    if (previous && *previous == *r.chunk) continue;  // exact duplicate
    previous = r.chunk;
    if (overlaps_taken(r.chunk->span)) continue;
    taken.emplace(r.chunk->span.start, r.chunk->span.end);
    (r.chunk->phi ? out.chunks : out.suppressors).push_back(*r.chunk);
  }
  auto by_start = [](const EntityChunk& a, const EntityChunk& b) { return a.span < b.span; };
  std::sort(out.chunks.begin(), out.chunks.end(), by_start);
  std::sort(out.suppressors.begin(), out.suppressors.end(), by_start);
  return out;
}

MergedChunks merge(std::span<const RecognizerOutput> outputs, std::span<const EntityChunk> rule_chunks,
                   const MergePolicy& policy) {
  std::vector<EntityChunk> all;
  for (const auto& o : outputs) all.insert(all.end(), o.chunks.begin(), o.chunks.end());
  all.insert(all.end(), rule_chunks.begin(), rule_chunks.end());
  return merge(all, policy);
}

}  // namespace deid
