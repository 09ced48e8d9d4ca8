#pragma once

// Core domain types shared by every stage: the label taxonomy, character
// spans, detected chunks and input documents.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace deid {

/// Entity labels. The first thirteen are the granular schema; Name, Location,
/// Contact and Id only exist in the coarse schema (Date, Age and Organization
/// are in both). Disease is a clinical, non-PHI label used by suppressing
/// recognizers.
enum class Label : std::uint8_t {
  Patient,
  Doctor,
  Hospital,
  Date,
  Age,
  Profession,
  Organization,
  Street,
  City,
  Country,
  Phone,
  Username,
  Zip,
  Name,
  Location,
  Contact,
  Id,
  Disease,
};

inline constexpr std::size_t kLabelCount = 18;

inline constexpr std::array<Label, 13> kGranularLabels = {
    Label::Patient, Label::Doctor,  Label::Hospital, Label::Date,    Label::Age,
    Label::Profession, Label::Organization, Label::Street, Label::City,
    Label::Country, Label::Phone,   Label::Username, Label::Zip,
};

inline constexpr std::array<Label, 7> kCoarseLabels = {
    Label::Name, Label::Date, Label::Organization, Label::Location,
    Label::Age,  Label::Contact, Label::Id,
};

enum class Granularity : std::uint8_t { Coarse, Granular };

/// Canonical display name, e.g. "Patient", "ID".
std::string_view label_name(Label label) noexcept;

/// Upper-cased name used by entity masking, e.g. "PATIENT".
std::string mask_name(Label label);

/// Case-insensitive lookup by name. Accepts "Id" and "ID".
std::optional<Label> parse_label(std::string_view name) noexcept;

bool is_granular(Label label) noexcept;
bool is_coarse(Label label) noexcept;
bool has_granularity(Label label, Granularity g) noexcept;

/// False only for clinical labels that must survive de-identification.
bool is_phi(Label label) noexcept;

/// Default granular-to-coarse parent. Coarse and clinical labels map to
/// themselves, which keeps the function total over every label.
Label to_coarse(Label label) noexcept;

/// Granular-to-coarse mapping with per-pack overrides.
class Taxonomy {
 public:
  Taxonomy() = default;

  Label to_coarse(Label label) const noexcept;

  /// Throws ConfigError unless `granular` is granular and `coarse` is coarse.
  void set_parent(Label granular, Label coarse);

  bool operator==(const Taxonomy&) const = default;

 private:
  std::map<Label, Label> overrides_;
};

/// Half-open character range [start, end) in Unicode scalar values.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  constexpr std::size_t length() const noexcept { return end > start ? end - start : 0; }
  constexpr bool empty() const noexcept { return end <= start; }

  constexpr bool overlaps(const Span& o) const noexcept { return start < o.end && o.start < end; }

  constexpr bool contains(const Span& o) const noexcept { return start <= o.start && o.end <= end; }

  constexpr std::size_t intersection(const Span& o) const noexcept {
    const std::size_t lo = start > o.start ? start : o.start;
    const std::size_t hi = end < o.end ? end : o.end;
    return hi > lo ? hi - lo : 0;
  }

  friend constexpr auto operator<=>(const Span&, const Span&) = default;
};

/// A labeled span produced by a recognizer or rule.
struct EntityChunk {
  Span span;
  Label label = Label::Name;
  std::string text;
  std::string source;               // recognizer id or rule id
  std::string source_class = "ner"; // key into the merge priority table
  double confidence = 1.0;
  bool phi = true;

  bool operator==(const EntityChunk&) const = default;
};

struct Document {
  std::string id;
  std::optional<std::string> patient_id;
  std::string text;
  std::string language = "en";
};

}  // namespace deid
