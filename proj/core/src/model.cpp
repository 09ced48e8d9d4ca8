#include "deid/model.hpp"

#include <algorithm>
#include <cctype>

#include "deid/error.hpp"

namespace deid {
namespace {

constexpr std::array<std::string_view, kLabelCount> kNames = {
    "Patient", "Doctor", "Hospital", "Date",   "Age",      "Profession",
    "Organization", "Street", "City", "Country", "Phone", "Username",
    "Zip",     "Name",   "Location", "Contact", "ID",     "Disease",
};

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view label_name(Label label) noexcept {
  return kNames[static_cast<std::size_t>(label)];
}

std::string mask_name(Label label) {
  std::string s(label_name(label));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::optional<Label> parse_label(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (iequals(kNames[i], name)) return static_cast<Label>(i);
  }
  return std::nullopt;
}

bool is_granular(Label label) noexcept {
  return std::find(kGranularLabels.begin(), kGranularLabels.end(), label) != kGranularLabels.end();
}

bool is_coarse(Label label) noexcept {
  return std::find(kCoarseLabels.begin(), kCoarseLabels.end(), label) != kCoarseLabels.end();
}

bool has_granularity(Label label, Granularity g) noexcept {
  return g == Granularity::Coarse ? is_coarse(label) : is_granular(label);
}

bool is_phi(Label label) noexcept { return label != Label::Disease; }

Label to_coarse(Label label) noexcept {
  switch (label) {
    case Label::Patient:
    case Label::Doctor:
      return Label::Name;
    case Label::Hospital:
    case Label::Organization:
    case Label::Profession:
      return Label::Organization;
    case Label::Street:
    case Label::City:
    case Label::Country:
    case Label::Zip:
      return Label::Location;
    case Label::Phone:
    case Label::Username:
      return Label::Contact;
    default:
      return label;
  }
}

Label Taxonomy::to_coarse(Label label) const noexcept {
  if (auto it = overrides_.find(label); it != overrides_.end()) return it->second;
  return deid::to_coarse(label);
}

void Taxonomy::set_parent(Label granular, Label coarse) {
  if (!is_granular(granular)) {
    throw ConfigError("taxonomy override: '" + std::string(label_name(granular)) + "' is not a granular label");
  }
  if (!is_coarse(coarse)) {
    throw ConfigError("taxonomy override: '" + std::string(label_name(coarse)) + "' is not a coarse label");
  }
  overrides_[granular] = coarse;
}

}  // namespace deid
