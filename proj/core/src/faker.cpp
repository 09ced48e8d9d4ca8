#include "deid/faker.hpp"

#include <algorithm>
#include <numeric>

#include "deid/error.hpp"
#include "deid/random.hpp"
#include "deid/text.hpp"
#include "line_format.hpp"

namespace deid {
namespace {

constexpr std::size_t kNearest = 8;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    out.push_back(detail::trim(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos)));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::u32string folded_u32(std::string_view s) { return to_u32(normalize_name(s)); }

// Upper- or lower-cases `surrogate` when the original is written entirely in
// one case; otherwise keeps the vocabulary spelling.
std::string apply_case(const std::string& surrogate, std::u32string_view original) {
  std::size_t letters = 0, upper = 0, lower = 0;
  for (char32_t c : original) {
    if (!is_letter(c)) continue;
    ++letters;
    upper += is_upper(c);
    lower += is_lower(c);
  }
  if (letters >= 2 && upper == letters) return to_upper(surrogate);
  if (letters >= 1 && lower == letters) return to_lower(surrogate);
  return surrogate;
}

std::string force_length(const std::string& s, std::size_t length) {
  std::u32string u = to_u32(s);
  if (u.empty()) u = U"x";
  if (u.size() > length) {
    u.resize(length);
    while (!u.empty() && is_space(u.back())) u.back() = U'x';
  }
  while (u.size() < length) u.push_back(u.back() == U' ' ? U'x' : u.back());
  return to_utf8(u);
}

// Draws a surrogate from `pool` for an original whose folded form is
// `original`. Entries equal to the original are never chosen; entries in
// `avoid` only when nothing else is left. Empty when the pool is exhausted.
std::optional<std::string> draw(const SurrogateVocabulary& v, std::vector<std::size_t> pool,
                                const std::u32string& original, std::size_t original_length, LengthMode mode,
                                Rng& rng, const std::set<std::string>& avoid) {
  std::erase_if(pool, [&](std::size_t i) { return v.folded(i) == original; });
  if (pool.empty()) return std::nullopt;
  std::vector<std::size_t> fresh;
  for (std::size_t i : pool) {
    if (!avoid.count(normalize_name(v.entries()[i].text))) fresh.push_back(i);
  }
  if (!fresh.empty()) pool = std::move(fresh);

  if (mode == LengthMode::SameLength) {
    std::vector<std::size_t> same;
    for (std::size_t i : pool) {
      if (v.entries()[i].length == original_length) same.push_back(i);
    }
    if (!same.empty()) return v.entries()[same[rng.below(same.size())]].text;
    std::size_t best = SIZE_MAX;
    std::vector<std::size_t> ties;
    for (std::size_t i : pool) {
      const std::size_t d = levenshtein(v.folded(i), original);
      if (d < best) {
        best = d;
        ties.clear();
      }
      if (d == best) ties.push_back(i);
    }
    std::string forced = force_length(v.entries()[ties[rng.below(ties.size())]].text, original_length);
    if (to_u32(normalize_name(forced)) == original) {
      std::u32string u = to_u32(forced);
      u.back() = u.back() == U'x' ? U'y' : U'x';
      forced = to_utf8(u);
    }
    return forced;
  }

  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (distance, index)
  scored.reserve(pool.size());
  for (std::size_t i : pool) scored.emplace_back(levenshtein(v.folded(i), original), i);
  const std::size_t k = std::min(kNearest, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
  return v.entries()[scored[rng.below(k)].second].text;
}

struct NameToken {
  std::size_t start = 0;  // code points within the name body
  std::size_t end = 0;
  NamePart part = NamePart::First;
};

bool is_initial(std::u32string_view tok) {
  std::size_t letters = 0;
  for (char32_t c : tok) letters += is_letter(c);
  return letters == 1 && tok.size() <= 2;
}

std::vector<NameToken> split_name(std::u32string_view body) {
  std::vector<NameToken> toks;
  std::size_t comma = body.find(U',');
  for (std::size_t i = 0; i < body.size();) {
    if (is_space(body[i]) || body[i] == U',') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && !is_space(body[j]) && body[j] != U',') ++j;
    NameToken t{i, j, NamePart::First};
    if (comma != std::u32string_view::npos) t.part = i < comma ? NamePart::Last : NamePart::First;
    toks.push_back(t);
    i = j;
  }
  if (comma == std::u32string_view::npos && toks.size() >= 2) toks.back().part = NamePart::Last;
  if (comma == std::u32string_view::npos && toks.size() == 1) toks.front().part = NamePart::Any;
  return toks;
}

std::set<std::string> values_of(const std::map<std::string, std::string>& m) {
  std::set<std::string> out;
  for (const auto& [k, v] : m) out.insert(normalize_name(v));
  return out;
}

}  // namespace

std::optional<Gender> parse_gender(std::string_view s) noexcept {
  if (s == "f" || s == "F" || s == "feminine" || s == "female") return Gender::Feminine;
  if (s == "m" || s == "M" || s == "masculine" || s == "male") return Gender::Masculine;
  if (s.empty() || s == "u" || s == "U" || s == "-" || s == "unknown") return Gender::Unknown;
  return std::nullopt;
}

std::string_view gender_name(Gender g) noexcept {
  switch (g) {
    case Gender::Feminine: return "feminine";
    case Gender::Masculine: return "masculine";
    case Gender::Unknown: return "unknown";
  }
  return "unknown";
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string normalize_name(std::string_view s) {
  const std::u32string u = to_u32(fold_case(s));
  std::u32string out;
  bool space = false;
  for (char32_t c : u) {
    if (is_space(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(U' ');
    space = false;
    out.push_back(c);
  }
  return to_utf8(out);
}

// --- SurrogateVocabulary ----------------------------------------------------

void SurrogateVocabulary::add(std::string entry, Gender gender, std::string locale) {
  if (entry.empty()) throw ConfigError("empty vocabulary entry");
  const std::size_t idx = entries_.size();
  const std::size_t len = char_length(entry);
  const std::string key = normalize_name(entry);
  folded_.push_back(to_u32(key));
  by_key_.emplace(key, idx);
  buckets_[len].push_back(idx);
  entries_.push_back({std::move(entry), gender, std::move(locale), len});
}

const std::vector<std::size_t>& SurrogateVocabulary::bucket(std::size_t length) const {
  static const std::vector<std::size_t> none;
  auto it = buckets_.find(length);
  return it == buckets_.end() ? none : it->second;
}

std::optional<Gender> SurrogateVocabulary::gender_of(std::string_view name) const {
  auto it = by_key_.find(normalize_name(name));
  if (it == by_key_.end()) return std::nullopt;
  return entries_[it->second].gender;
}

bool SurrogateVocabulary::contains(std::string_view name) const { return by_key_.count(normalize_name(name)) > 0; }

std::size_t SurrogateVocabulary::count(Gender g) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [g](const VocabEntry& e) { return e.gender == g; }));
}

SurrogateVocabulary SurrogateVocabulary::parse(std::string_view content, const std::string& resource_name) {
  const auto lines = detail::content_lines(content);
  if (lines.empty()) throw ConfigError(resource_name, 0, "vocabulary is empty");
  const auto header = detail::parse_header_fields(lines[0].text, resource_name, lines[0].number);
  std::optional<Label> label;
  NamePart part = NamePart::Any;
  for (const auto& [k, v] : header) {
    if (k == "label") {
      label = parse_label(v);
      if (!label) throw ConfigError(resource_name, lines[0].number, "invalid label '" + v + "'");
    } else if (k == "part") {
      if (v == "first") part = NamePart::First;
      else if (v == "last") part = NamePart::Last;
      else throw ConfigError(resource_name, lines[0].number, "part must be first or last");
    } else {
      throw ConfigError(resource_name, lines[0].number, "unknown header field '" + k + "'");
    }
  }
  if (!label) throw ConfigError(resource_name, lines[0].number, "header lacks label=");
  SurrogateVocabulary vocab(*label, part);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_tabs(lines[i].text);
    if (fields.size() > 3) throw ConfigError(resource_name, lines[i].number, "expected entry<TAB>gender<TAB>locale");
    const auto gender = parse_gender(fields.size() > 1 ? fields[1] : std::string_view{});
    if (!gender) throw ConfigError(resource_name, lines[i].number, "invalid gender '" + std::string(fields[1]) + "'");
    try {
      vocab.add(std::string(fields[0]), *gender, fields.size() > 2 ? std::string(fields[2]) : std::string{});
    } catch (const Error& e) {
      throw ConfigError(resource_name, lines[i].number, e.what());
    }
  }
  if (vocab.empty()) throw ConfigError(resource_name, 0, "vocabulary has no entries");
  return vocab;
}

SurrogateVocabulary SurrogateVocabulary::load(const std::string& path) {
  return parse(detail::read_file(path), path);
}

// --- AgeGroupTable -----------------------------------------------------------

AgeGroupTable::AgeGroupTable(std::vector<int> lower_bounds, int open_top_max)
    : bounds_(std::move(lower_bounds)), open_top_max_(open_top_max) {
  if (bounds_.empty() || bounds_.front() != 0) throw ConfigError("age groups must start at 0");
  for (std::size_t i = 1; i < bounds_.size(); ++i) {
    if (bounds_[i] <= bounds_[i - 1]) throw ConfigError("age group bounds must strictly increase");
  }
}

AgeGroupTable AgeGroupTable::parse(std::string_view spec) {
  std::vector<int> bounds;
  while (!spec.empty()) {
    const std::size_t comma = spec.find(',');
    bounds.push_back(static_cast<int>(detail::parse_int(detail::trim(spec.substr(0, comma)), "age-groups", 0)));
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return AgeGroupTable(std::move(bounds));
}

std::size_t AgeGroupTable::group_of(int age) const {
  const auto it = std::upper_bound(bounds_.begin(), bounds_.end(), age);
  return static_cast<std::size_t>(it - bounds_.begin()) - 1;
}

std::pair<int, int> AgeGroupTable::range_of(int age) const {
  const std::size_t g = group_of(age);
  const int lo = bounds_[g];
  const int hi = g + 1 < bounds_.size() ? bounds_[g + 1] - 1 : std::max(open_top_max_, age);
  return {lo, hi};
}

// --- TitleList ---------------------------------------------------------------

void TitleList::add(std::string title, Gender gender) { titles_.emplace_back(folded_u32(title), gender); }

TitleList TitleList::parse(std::string_view content, const std::string& resource_name) {
  TitleList list;
  for (const auto& line : detail::content_lines(content)) {
    const auto fields = split_tabs(line.text);
    const auto gender = parse_gender(fields.size() > 1 ? fields[1] : std::string_view{});
    if (fields.size() > 2 || !gender) throw ConfigError(resource_name, line.number, "expected title<TAB>gender");
    list.add(std::string(fields[0]), *gender);
  }
  return list;
}

TitleList TitleList::load(const std::string& path) { return parse(detail::read_file(path), path); }

std::optional<TitleList::Match> TitleList::leading(std::u32string_view name) const {
  std::optional<Match> best;
  for (const auto& [title, gender] : titles_) {
    if (title.size() >= name.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < title.size() && ok; ++i) ok = fold_char(name[i]) == title[i];
    if (!ok || !is_space(name[title.size()])) continue;
    std::size_t len = title.size();
    while (len < name.size() && is_space(name[len])) ++len;
    if (len == name.size()) continue;
    if (!best || len > best->length) best = Match{len, gender};
  }
  return best;
}

// --- UserDictionary ----------------------------------------------------------

void UserDictionary::add(std::string original, std::string replacement, std::optional<Label> label) {
  if (original.empty() || replacement.empty()) throw ConfigError("dictionary entries must be non-empty");
  if (label) {
    labeled_[{*label, normalize_name(original)}] = std::move(replacement);
  } else {
    plain_[normalize_name(original)] = std::move(replacement);
  }
}

std::optional<std::string> UserDictionary::find(std::string_view original, Label label) const {
  const std::string key = normalize_name(original);
  if (auto it = labeled_.find({label, key}); it != labeled_.end()) return it->second;
  if (auto it = plain_.find(key); it != plain_.end()) return it->second;
  return std::nullopt;
}

UserDictionary UserDictionary::parse(std::string_view content, const std::string& resource_name) {
  UserDictionary d;
  for (const auto& line : detail::content_lines(content)) {
    const auto f = split_tabs(line.text);
    try {
      if (f.size() == 2) {
        d.add(std::string(f[0]), std::string(f[1]));
      } else if (f.size() == 3) {
        const auto label = parse_label(f[0]);
        if (!label) throw ConfigError("invalid label '" + std::string(f[0]) + "'");
        d.add(std::string(f[1]), std::string(f[2]), label);
      } else {
        throw ConfigError("expected original<TAB>replacement or Label<TAB>original<TAB>replacement");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(resource_name, line.number, e.what());
    }
  }
  return d;
}

UserDictionary UserDictionary::load(const std::string& path) { return parse(detail::read_file(path), path); }

// --- PatientContext ----------------------------------------------------------

PatientContext PatientContext::make(std::uint64_t global_seed, std::string patient_id, int day_shift,
                                    AgeGroupTable ages) {
  PatientContext ctx;
  ctx.rng_seed = keyed_hash(global_seed, "patient", patient_id);
  ctx.patient_id = std::move(patient_id);
  ctx.day_shift = day_shift;
  ctx.age_policy = std::move(ages);
  return ctx;
}

std::uint64_t PatientContext::key(std::string_view purpose, std::string_view original) const {
  return keyed_hash(rng_seed, purpose, original);
}

// --- operations --------------------------------------------------------------

std::string shape_surrogate(std::string_view original, std::uint64_t seed) {
  Rng rng(seed);
  const std::u32string in = to_u32(original);
  std::u32string out = in;
  for (auto& c : out) {
    if (is_digit(c)) c = U'0' + static_cast<char32_t>(rng.below(10));
    else if (is_upper(c)) c = U'A' + static_cast<char32_t>(rng.below(26));
    else if (is_letter(c)) c = U'a' + static_cast<char32_t>(rng.below(26));
  }
  if (out == in) {
    for (auto& c : out) {
      if (c >= U'0' && c <= U'9') { c = c == U'9' ? U'0' : c + 1; break; }
      if (c >= U'a' && c <= U'z') { c = c == U'z' ? U'a' : c + 1; break; }
      if (c >= U'A' && c <= U'Z') { c = c == U'Z' ? U'A' : c + 1; break; }
    }
  }
  return to_utf8(out);
}

std::string fake_name(std::string_view original, PatientContext& ctx, Gender gender, const NameVocabularies& vocab,
                      LengthMode mode, Label role) {
  const std::u32string name = to_u32(original);
  std::size_t title_len = 0;
  Gender title_gender = Gender::Unknown;
  if (vocab.titles) {
    if (auto m = vocab.titles->leading(name)) {
      title_len = m->length;
      title_gender = m->gender;
    }
  }
  const std::u32string body = name.substr(title_len);
  auto tokens = split_name(body);

  for (auto& t : tokens) {
    if (t.part != NamePart::Any) continue;
    const std::string key = normalize_name(to_utf8(body.substr(t.start, t.end - t.start)));
    if (ctx.first_map.count(key)) t.part = NamePart::First;
    else if (ctx.last_map.count(key)) t.part = NamePart::Last;
    else if (vocab.first && vocab.first->contains(key)) t.part = NamePart::First;
    else if (vocab.last && vocab.last->contains(key)) t.part = NamePart::Last;
    else t.part = role == Label::Doctor ? NamePart::Last : NamePart::First;
  }

  std::u32string out = name.substr(0, title_len);
  std::size_t cursor = 0;
  for (const auto& t : tokens) {
    out.append(body, cursor, t.start - cursor);
    const std::u32string tok = body.substr(t.start, t.end - t.start);
    const std::string key = normalize_name(to_utf8(tok));
    auto& map = t.part == NamePart::Last ? ctx.last_map : ctx.first_map;
    std::string replacement;
    if (auto it = map.find(key); it != map.end()) {
      replacement = it->second;
    } else if (is_initial(tok)) {
      Rng rng(ctx.key("initial", key));
      std::u32string r = tok;
      for (auto& c : r) {
        if (!is_letter(c)) continue;
        char32_t pick = U'A' + static_cast<char32_t>(rng.below(25));
        if (pick >= static_cast<char32_t>(to_upper(c))) ++pick;  // never the same letter
        c = pick;
      }
      replacement = to_utf8(r);
      map.emplace(key, replacement);
    } else {
      const SurrogateVocabulary* v = t.part == NamePart::Last ? vocab.last : vocab.first;
      std::optional<std::string> drawn;
      if (v && !v->empty()) {
        Gender g = Gender::Unknown;
        if (t.part == NamePart::First) {
          if (auto known = v->gender_of(key); known && *known != Gender::Unknown) g = *known;
          else if (title_gender != Gender::Unknown) g = title_gender;
          else g = gender;
        }
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < v->size(); ++i) {
          if (g == Gender::Unknown || v->entries()[i].gender == g) pool.push_back(i);
        }
        if (pool.empty()) {
          pool.resize(v->size());
          std::iota(pool.begin(), pool.end(), std::size_t{0});
        }
        Rng rng(ctx.key(t.part == NamePart::Last ? "last" : "first", key));
        drawn = draw(*v, std::move(pool), to_u32(key), tok.size(), mode, rng, values_of(map));
      }
      replacement = drawn ? *drawn : shape_surrogate(to_utf8(tok), ctx.key("name-shape", key));
      map.emplace(key, replacement);
    }
    std::string cased = apply_case(replacement, tok);
    if (mode == LengthMode::SameLength && char_length(cased) != tok.size()) cased = force_length(cased, tok.size());
    out += to_u32(cased);
    cursor = t.end;
  }
  out.append(body, cursor, std::u32string::npos);
  std::string result = to_utf8(out);
  ctx.name_map[normalize_name(to_utf8(body))] = to_utf8(out.substr(title_len));
  return result;
}

int fake_age(int age, const AgeGroupTable& table, const PatientContext& ctx, bool same_digits) {
  if (age < 0) throw InternalError("negative age");
  const auto [lo, hi] = table.range_of(age);
  const std::size_t digits = std::to_string(age).size();
  std::vector<int> candidates;
  for (int a = lo; a <= hi; ++a) {
    if (a == age) continue;
    if (same_digits && std::to_string(a).size() != digits) continue;
    candidates.push_back(a);
  }
  if (candidates.empty()) return age;
  Rng rng(ctx.key("age", std::to_string(age)));
  return candidates[rng.below(candidates.size())];
}

std::string pick_surrogate(const EntityChunk& chunk, const SurrogateVocabulary& vocab, PatientContext& ctx,
                           LengthMode mode) {
  const std::string key = normalize_name(chunk.text);
  const std::u32string text = to_u32(chunk.text);
  std::string value;
  if (auto it = ctx.value_map.find({chunk.label, key}); it != ctx.value_map.end()) {
    value = it->second;
  } else {
    std::set<std::string> used;
    for (const auto& [k, v] : ctx.value_map) {
      if (k.first == chunk.label) used.insert(normalize_name(v));
    }
    std::vector<std::size_t> pool(vocab.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    const std::string purpose = "value:" + std::string(label_name(chunk.label));
    Rng rng(ctx.key(purpose, key));
    auto drawn = draw(vocab, std::move(pool), to_u32(key), text.size(), mode, rng, used);
    value = drawn ? *drawn : shape_surrogate(chunk.text, ctx.key(purpose + ":shape", key));
    ctx.value_map.emplace(std::pair{chunk.label, key}, value);
  }
  std::string cased = apply_case(value, text);
  if (mode == LengthMode::SameLength && char_length(cased) != text.size()) cased = force_length(cased, text.size());
  return cased;
}

std::optional<std::string> lookup_override(const EntityChunk& chunk, const UserDictionary& dictionary) {
  return dictionary.find(chunk.text, chunk.label);
}

// --- Faker -------------------------------------------------------------------

bool Faker::is_name_label(Label label) noexcept {
  return label == Label::Patient || label == Label::Doctor || label == Label::Name;
}

void Faker::add_vocabulary(SurrogateVocabulary v) {
  const auto key = std::pair{v.label(), v.part()};
  if (vocabs_.count(key)) {
    throw ConfigError("duplicate surrogate vocabulary for label " + std::string(label_name(v.label())));
  }
  vocabs_.emplace(key, std::move(v));
}

const SurrogateVocabulary* Faker::vocabulary(Label label, NamePart part) const {
  auto it = vocabs_.find({label, part});
  return it == vocabs_.end() ? nullptr : &it->second;
}

NameVocabularies Faker::names() const {
  NameVocabularies n;
  n.first = vocabulary(Label::Name, NamePart::First);
  n.last = vocabulary(Label::Name, NamePart::Last);
  n.titles = &titles_;
  return n;
}

void Faker::validate() const {
  const auto n = names();
  if (!n.first) return;
  if (n.first->count(Gender::Feminine) == 0 || n.first->count(Gender::Masculine) == 0) {
    throw ConfigError("first-name vocabulary needs both feminine and masculine entries");
  }
}

std::optional<std::string> Faker::surrogate(const EntityChunk& chunk, PatientContext& ctx, LengthMode mode,
                                            Gender cue) const {
  const std::u32string text = to_u32(chunk.text);
  if (auto custom = lookup_override(chunk, dictionary_)) {
    if (is_name_label(chunk.label)) {
      const auto from = split_name(text);
      const std::u32string rep = to_u32(*custom);
      const auto to = split_name(rep);
      ctx.name_map[normalize_name(chunk.text)] = *custom;
      if (from.size() == to.size()) {
        for (std::size_t i = 0; i < from.size(); ++i) {
          const std::string k = normalize_name(to_utf8(text.substr(from[i].start, from[i].end - from[i].start)));
          const std::string v = to_utf8(rep.substr(to[i].start, to[i].end - to[i].start));
          (from[i].part == NamePart::Last ? ctx.last_map : ctx.first_map)[k] = v;
        }
      }
    } else {
      ctx.value_map[{chunk.label, normalize_name(chunk.text)}] = *custom;
    }
    return custom;
  }

  if (is_name_label(chunk.label)) return fake_name(chunk.text, ctx, cue, names(), mode, chunk.label);

  if (chunk.label == Label::Age) {
    std::size_t i = 0;
    while (i < text.size() && !(text[i] >= U'0' && text[i] <= U'9')) ++i;
    if (i == text.size()) return std::nullopt;
    std::size_t j = i;
    while (j < text.size() && j - i < 3 && text[j] >= U'0' && text[j] <= U'9') ++j;
    const int age = std::stoi(to_utf8(text.substr(i, j - i)));
    const int fake = fake_age(age, ctx.age_policy, ctx, mode == LengthMode::SameLength);
    std::string digits = std::to_string(fake);
    if (mode == LengthMode::SameLength && digits.size() < j - i) digits.insert(0, j - i - digits.size(), '0');
    return to_utf8(text.substr(0, i)) + digits + to_utf8(text.substr(j));
  }

  const SurrogateVocabulary* v = vocabulary(chunk.label);
  if (!v && to_coarse(chunk.label) != chunk.label) v = vocabulary(to_coarse(chunk.label));
  if (v) return pick_surrogate(chunk, *v, ctx, mode);

  const std::string key = normalize_name(chunk.text);
  if (auto it = ctx.value_map.find({chunk.label, key}); it != ctx.value_map.end()) return it->second;
  std::string value = shape_surrogate(chunk.text, ctx.key("shape:" + std::string(label_name(chunk.label)), key));
  ctx.value_map.emplace(std::pair{chunk.label, key}, value);
  return value;
}

}  // namespace deid
