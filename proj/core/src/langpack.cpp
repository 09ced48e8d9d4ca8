#include "deid/langpack.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <map>

#include "deid/error.hpp"
#include "deid/random.hpp"
#include "deid/text.hpp"
#include "line_format.hpp"

#ifndef DEID_PACKS_DIR
#define DEID_PACKS_DIR "packs"
#endif

namespace deid {
namespace {

namespace fs = std::filesystem;

const std::set<std::string> kKinds = {"gazetteer", "titles", "patterns", "rules", "abbreviations",
                                      "dates",     "vocab",  "policy"};

// Single-instance kinds.
const std::set<std::string> kSingle = {"abbreviations", "titles", "dates", "policy"};

std::string where(const std::string& manifest, std::size_t line) {
  return manifest + ":" + std::to_string(line);
}

bool escapes(const fs::path& rel) {
  if (rel.is_absolute()) return true;
  for (const auto& part : rel.lexically_normal()) {
    if (part == "..") return true;
  }
  return false;
}

}  // namespace

LanguagePack LanguagePack::load(const fs::path& dir) {
  LanguagePack pack;
  std::vector<std::string> problems;
  pack.root_ = fs::absolute(dir).lexically_normal();
  const fs::path manifest_path = pack.root_ / kManifestName;
  const std::string manifest_name = manifest_path.string();

  std::string manifest;
  try {
    manifest = detail::read_file(manifest_name);
  } catch (const Error&) {
    throw PackError({"missing manifest: " + manifest_name});
  }

  std::uint64_t hash = fnv1a64(manifest);
  std::set<std::string> seen_keys;
  std::set<Label> taxonomy_seen;
  for (const auto& line : detail::content_lines(manifest)) {
    const std::size_t eq = line.text.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where(manifest_name, line.number) + ": expected 'key = value'");
      continue;
    }
    const std::string key(detail::trim(line.text.substr(0, eq)));
    const std::string value(detail::trim(line.text.substr(eq + 1)));
    if (!seen_keys.insert(key).second) {
      problems.push_back(where(manifest_name, line.number) + ": duplicate key '" + key + "'");
      continue;
    }
    if (key == "language") {
      pack.language_ = value;
    } else if (key == "version") {
      pack.version_ = value;
    } else if (key.starts_with("taxonomy.")) {
      const auto child = parse_label(key.substr(9));
      const auto parent = parse_label(value);
      if (!child || !parent) {
        problems.push_back(where(manifest_name, line.number) + ": invalid taxonomy entry '" + key + "'");
        continue;
      }
      if (!taxonomy_seen.insert(*child).second) {
        problems.push_back(where(manifest_name, line.number) + ": duplicate label '" + key.substr(9) + "'");
        continue;
      }
      try {
        pack.taxonomy_.set_parent(*child, *parent);
      } catch (const ConfigError& e) {
        problems.push_back(where(manifest_name, line.number) + ": " + e.what());
      }
    } else if (key.starts_with("resource.")) {
      const std::string rest = key.substr(9);
      const std::size_t dot = rest.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == rest.size()) {
        problems.push_back(where(manifest_name, line.number) + ": expected resource.<kind>.<name>");
        continue;
      }
      PackResource r{rest.substr(0, dot), rest.substr(dot + 1), {}, line.number};
      if (!kKinds.count(r.kind)) {
        problems.push_back(where(manifest_name, line.number) + ": unknown resource kind '" + r.kind + "'");
        continue;
      }
      if (value.empty() || escapes(fs::path(value))) {
        problems.push_back(where(manifest_name, line.number) + ": resource '" + key +
                           "' must be a path inside the pack");
        continue;
      }
      r.path = (pack.root_ / value).lexically_normal();
      pack.resources_.push_back(std::move(r));
    } else {
      problems.push_back(where(manifest_name, line.number) + ": unknown key '" + key + "'");
    }
  }
  if (pack.language_.empty()) problems.push_back(manifest_name + ": missing 'language'");
  if (pack.version_.empty()) problems.push_back(manifest_name + ": missing 'version'");

  std::map<std::string, std::size_t> single_count;
  for (const auto& r : pack.resources_) {
    if (kSingle.count(r.kind) && ++single_count[r.kind] == 2) {
      problems.push_back(where(manifest_name, r.line) + ": more than one '" + r.kind + "' resource");
    }
  }

  bool have_dates = false;
  bool have_policy = false;
  std::vector<ContextualRule> rules;
  for (const auto& r : pack.resources_) {
    const std::string entry = "resource." + r.kind + "." + r.name;
    std::string content;
    try {
      content = detail::read_file(r.path.string());
    } catch (const Error&) {
      problems.push_back(where(manifest_name, r.line) + ": " + entry + " refers to missing file " + r.path.string());
      continue;
    }
    hash = fnv1a64(content, splitmix64(hash ^ fnv1a64(entry)));
    const std::string res = r.path.string();
    try {
      if (r.kind == "gazetteer") {
        pack.gazetteers_.push_back(std::make_shared<const Gazetteer>(Gazetteer::parse(content, res)));
        pack.gazetteer_ids_.push_back(r.name);
      } else if (r.kind == "patterns") {
        pack.patterns_.emplace_back(r.name, PatternRecognizer::parse(content, res));
        PatternRecognizer("check", pack.patterns_.back().second);
      } else if (r.kind == "rules") {
        auto set = compile_ruleset(content, res, pack.language_);
        rules.insert(rules.end(), set.rules().begin(), set.rules().end());
      } else if (r.kind == "abbreviations") {
        pack.sentences_.abbreviations = SentenceConfig::parse_abbreviations(content);
      } else if (r.kind == "titles") {
        pack.faker_.set_titles(TitleList::parse(content, res));
      } else if (r.kind == "dates") {
        pack.dates_ = DateLocale::parse(content, res, pack.language_);
        have_dates = true;
      } else if (r.kind == "vocab") {
        pack.faker_.add_vocabulary(SurrogateVocabulary::parse(content, res));
      } else if (r.kind == "policy") {
        pack.policy_ = MergePolicy::parse(content, res);
        have_policy = true;
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      problems.push_back(msg.starts_with(res) ? msg : res + ": " + msg);
    } catch (const Error& e) {
      problems.push_back(res + ": " + e.what());
    }
  }

  try {
    pack.rules_ = RuleSet(std::move(rules), pack.language_);
  } catch (const ConfigError& e) {
    problems.push_back(manifest_name + ": rules: " + e.what());
  }
  if (!have_dates) problems.push_back(manifest_name + ": no 'dates' resource");
  if (!have_policy) pack.policy_.set_default(0);

  std::map<Label, std::pair<int, int>> name_roles;
  for (const auto& g : pack.gazetteers_) {
    if (g->role == NameRole::First) ++name_roles[g->label()].first;
    if (g->role == NameRole::Last) ++name_roles[g->label()].second;
  }
  for (const auto& [label, counts] : name_roles) {
    if (counts.first != 1 || counts.second != 1) {
      problems.push_back(manifest_name + ": label " + std::string(label_name(label)) +
                         " needs exactly one role=first and one role=last gazetteer");
    }
  }

  try {
    pack.faker_.validate();
  } catch (const ConfigError& e) {
    problems.push_back(manifest_name + ": vocab: " + e.what());
  }
  if (problems.empty()) {
    try {
      pack.policy_.validate(pack.source_classes());
    } catch (const ConfigError& e) {
      problems.push_back(manifest_name + ": policy: " + e.what());
    }
  }

  if (!problems.empty()) throw PackError(std::move(problems));

  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, splitmix64(hash));
  pack.content_hash_ = buf;
  return pack;
}

std::vector<std::unique_ptr<Recognizer>> LanguagePack::make_recognizers() const {
  std::vector<std::unique_ptr<Recognizer>> out;
  std::map<Label, std::pair<std::shared_ptr<const Gazetteer>, std::shared_ptr<const Gazetteer>>> names;
  for (std::size_t i = 0; i < gazetteers_.size(); ++i) {
    const auto& g = gazetteers_[i];
    const std::string& id = gazetteer_ids_[i];
    if (g->role == NameRole::First) names[g->label()].first = g;
    else if (g->role == NameRole::Last) names[g->label()].second = g;
    else out.push_back(std::make_unique<GazetteerRecognizer>("gazetteer:" + id, g));
  }
  for (const auto& [label, pair] : names) {
    auto rec = std::make_unique<PersonNameRecognizer>("names:" + to_lower(std::string(label_name(label))), label,
                                                      pair.first, pair.second);
    rec->source_class = pair.first->source_class;
    rec->confidence = pair.first->confidence;
    out.push_back(std::move(rec));
  }
  for (const auto& [name, defs] : patterns_) {
    out.push_back(std::make_unique<PatternRecognizer>("patterns:" + name, defs));
  }
  return out;
}

std::set<std::string> LanguagePack::source_classes() const {
  std::set<std::string> out;
  for (const auto& g : gazetteers_) out.insert(g->source_class);
  for (const auto& [name, defs] : patterns_) {
    for (const auto& d : defs) out.insert(d.source_class);
  }
  for (const auto& r : rules_.rules()) out.insert(r.source_class);
  return out;
}

std::vector<std::string> list_supported(const fs::path& packs_dir) {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(packs_dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(packs_dir, ec)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / LanguagePack::kManifestName)) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path default_packs_dir() { return fs::path(DEID_PACKS_DIR); }

}  // namespace deid
