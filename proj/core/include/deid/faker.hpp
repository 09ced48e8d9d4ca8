#pragma once

// Surrogate generation for obfuscation. All draws are keyed by
// (patient seed, purpose, normalized original), so a patient's surrogates do
// not depend on which other patients or documents are in the run.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deid/model.hpp"

namespace deid {

enum class Gender : std::uint8_t { Feminine, Masculine, Unknown };
enum class LengthMode : std::uint8_t { Free, SameLength };
enum class NamePart : std::uint8_t { Any, First, Last };

/// Accepts f/m/u (and feminine/masculine/unknown, '-').
std::optional<Gender> parse_gender(std::string_view s) noexcept;
std::string_view gender_name(Gender g) noexcept;

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

struct VocabEntry {
  std::string text;
  Gender gender = Gender::Unknown;
  std::string locale;
  std::size_t length = 0;  // code points
};

/// Replacement values for one label, bucketed by length.
///
/// File format: a header `label=<L>[;part=first|last]`, then rows
/// `entry<TAB>gender<TAB>locale` (gender and locale optional).
class SurrogateVocabulary {
 public:
  explicit SurrogateVocabulary(Label label, NamePart part = NamePart::Any) : label_(label), part_(part) {}

  void add(std::string entry, Gender gender = Gender::Unknown, std::string locale = {});

  Label label() const noexcept { return label_; }
  NamePart part() const noexcept { return part_; }
  const std::vector<VocabEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Entry indices whose length is `length` (empty when none).
  const std::vector<std::size_t>& bucket(std::size_t length) const;
  const std::map<std::size_t, std::vector<std::size_t>>& buckets() const noexcept { return buckets_; }

  /// Gender tag of an entry equal to `name` after case folding.
  std::optional<Gender> gender_of(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t count(Gender g) const;

  /// Case-folded code points of entry `i`, for distance computations.
  const std::u32string& folded(std::size_t i) const { return folded_[i]; }

  static SurrogateVocabulary parse(std::string_view content, const std::string& resource_name);
  static SurrogateVocabulary load(const std::string& path);

 private:
  Label label_;
  NamePart part_;
  std::vector<VocabEntry> entries_;
  std::map<std::size_t, std::vector<std::size_t>> buckets_;
  std::vector<std::u32string> folded_;
  std::map<std::string, std::size_t> by_key_;  // folded text → first index
};

/// Age groups as increasing lower bounds; the last group is open-ended.
class AgeGroupTable {
 public:
  AgeGroupTable() = default;
  /// Throws ConfigError unless bounds start at 0 and strictly increase.
  explicit AgeGroupTable(std::vector<int> lower_bounds, int open_top_max = 99);

  static AgeGroupTable parse(std::string_view spec);  // "0,5,13,20,40,60,80"

  std::size_t group_of(int age) const;
  /// Inclusive range of the group containing `age`. The open group ends at
  /// max(open_top_max, age).
  std::pair<int, int> range_of(int age) const;
  const std::vector<int>& bounds() const noexcept { return bounds_; }

  bool operator==(const AgeGroupTable&) const = default;

 private:
  std::vector<int> bounds_ = {0, 5, 13, 20, 40, 60, 80};
  int open_top_max_ = 99;
};

/// Courtesy titles stripped before name lookup and kept in the output.
/// File rows: `title<TAB>gender`.
class TitleList {
 public:
  void add(std::string title, Gender gender = Gender::Unknown);
  static TitleList parse(std::string_view content, const std::string& resource_name);
  static TitleList load(const std::string& path);

  struct Match {
    std::size_t length = 0;  // code points, including trailing whitespace
    Gender gender = Gender::Unknown;
  };
  /// Longest title that starts `name` and is followed by whitespace.
  std::optional<Match> leading(std::u32string_view name) const;
  std::size_t size() const noexcept { return titles_.size(); }

 private:
  std::vector<std::pair<std::u32string, Gender>> titles_;  // folded
};

/// User-supplied replacements. Rows are `original<TAB>replacement` or
/// `Label<TAB>original<TAB>replacement`; labeled rows win.
class UserDictionary {
 public:
  void add(std::string original, std::string replacement, std::optional<Label> label = std::nullopt);
  std::optional<std::string> find(std::string_view original, Label label) const;
  bool empty() const noexcept { return plain_.empty() && labeled_.empty(); }

  static UserDictionary parse(std::string_view content, const std::string& resource_name);
  static UserDictionary load(const std::string& path);

 private:
  std::map<std::string, std::string> plain_;
  std::map<std::pair<Label, std::string>, std::string> labeled_;
};

/// Mutable per-patient state. Confined to one worker at a time.
struct PatientContext {
  std::string patient_id;
  std::uint64_t rng_seed = 0;
  int day_shift = 0;
  AgeGroupTable age_policy;
  /// Normalized original full name → surrogate.
  std::map<std::string, std::string> name_map;
  /// Normalized name components → surrogate components.
  std::map<std::string, std::string> first_map;
  std::map<std::string, std::string> last_map;
  /// Other labels: (label, normalized original) → surrogate.
  std::map<std::pair<Label, std::string>, std::string> value_map;

  static PatientContext make(std::uint64_t global_seed, std::string patient_id, int day_shift = 0,
                             AgeGroupTable ages = {});

  std::uint64_t key(std::string_view purpose, std::string_view original) const;
};

/// Case fold, NFC and collapse whitespace.
std::string normalize_name(std::string_view s);

struct NameVocabularies {
  const SurrogateVocabulary* first = nullptr;
  const SurrogateVocabulary* last = nullptr;
  const TitleList* titles = nullptr;
};

/// Component-wise name replacement ("Last, First" is understood). Titles
/// are kept. A single token is treated as a first name unless it is a known
/// surname, or `role` is Doctor. The result is recorded in ctx.
std::string fake_name(std::string_view original, PatientContext& ctx, Gender gender, const NameVocabularies& vocab,
                      LengthMode mode = LengthMode::Free, Label role = Label::Patient);

/// Value in the same age group, different from `age` unless that is
/// impossible. With same_digits the digit count is kept too.
int fake_age(int age, const AgeGroupTable& table, const PatientContext& ctx, bool same_digits = false);

/// Vocabulary draw for a non-name chunk, consistent per patient.
std::string pick_surrogate(const EntityChunk& chunk, const SurrogateVocabulary& vocab, PatientContext& ctx,
                           LengthMode mode);

std::optional<std::string> lookup_override(const EntityChunk& chunk, const UserDictionary& dictionary);

/// Replaces each digit with a digit and each letter with a letter of the
/// same case; everything else is kept. Never returns the input unchanged
/// when it has a letter or digit.
std::string shape_surrogate(std::string_view original, std::uint64_t seed);

/// Vocabulary registry plus dispatch by label.
class Faker {
 public:
  /// Throws ConfigError on a duplicate (label, part).
  void add_vocabulary(SurrogateVocabulary v);
  const SurrogateVocabulary* vocabulary(Label label, NamePart part = NamePart::Any) const;
  std::size_t vocabulary_count() const noexcept { return vocabs_.size(); }

  void set_titles(TitleList titles) { titles_ = std::move(titles); }
  const TitleList& titles() const noexcept { return titles_; }
  void set_dictionary(UserDictionary d) { dictionary_ = std::move(d); }
  const UserDictionary& dictionary() const noexcept { return dictionary_; }

  NameVocabularies names() const;

  /// Throws ConfigError when name vocabularies lack feminine or masculine
  /// first names.
  void validate() const;

  /// Surrogate for a non-date chunk. Empty when an Age chunk holds no number.
  std::optional<std::string> surrogate(const EntityChunk& chunk, PatientContext& ctx, LengthMode mode,
                                       Gender cue = Gender::Unknown) const;

  static bool is_name_label(Label label) noexcept;

 private:
  std::map<std::pair<Label, NamePart>, SurrogateVocabulary> vocabs_;
  TitleList titles_;
  UserDictionary dictionary_;
};

}  // namespace deid
