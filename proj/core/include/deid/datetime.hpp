#pragma once

// Date normalization and day shifting. Surface forms are described by
// format descriptors from the language pack; a parsed date remembers its
// descriptor so a shifted date is re-emitted in the shape it came in.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deid {

enum class MonthCase : std::uint8_t { Title, Upper, Lower };

struct ParsedDate {
  int year = 1970;
  int month = 1;
  /// Internal day. When has_day is false this is carried along only so that
  /// shifting stays exactly invertible; it is never rendered.
  int day = 1;
  bool has_day = true;
  std::string format_descriptor;
  std::string locale = "en";
  MonthCase month_case = MonthCase::Title;

  /// Compares the calendar date as written: the day only counts when present.
  friend bool operator==(const ParsedDate& a, const ParsedDate& b) noexcept {
    return a.year == b.year && a.month == b.month && a.has_day == b.has_day && (!a.has_day || a.day == b.day) &&
           a.format_descriptor == b.format_descriptor && a.locale == b.locale && a.month_case == b.month_case;
  }
};

/// One surface pattern. Placeholders: {YYYY} {YY} {MM} (two digits) {M}
/// (one or two, no leading zero) {DD} {D} {Month} (full name) {Mon}
/// (abbreviation). Everything else is literal.
struct DateFormat {
  std::string id;
  std::string pattern;

  enum class Field : std::uint8_t { Literal, Year4, Year2, Month2, Month1, Day2, Day1, MonthName, MonthAbbr };
  struct Piece {
    Field field = Field::Literal;
    std::u32string literal;
    bool operator==(const Piece&) const = default;
  };
  std::vector<Piece> pieces;

  bool needs_day() const noexcept;
  bool needs_month() const noexcept;
  bool operator==(const DateFormat&) const = default;
};

/// Month names and format descriptors for one language.
///
/// File format (`#` comments):
///   pivot <n>
///   canonical <pattern>
///   month <1-12> <FullName> <Abbr> [<alias>...]
///   format <DESCRIPTOR-ID> <pattern>
/// Formats are tried in file order; the first full match wins.
class DateLocale {
 public:
  static const DateLocale& english();
  static DateLocale parse(std::string_view content, const std::string& resource_name, std::string language);
  static DateLocale load(const std::string& path, std::string language);

  const std::string& language() const noexcept { return language_; }
  int pivot() const noexcept { return pivot_; }
  const std::vector<DateFormat>& formats() const noexcept { return formats_; }
  const DateFormat* find_format(std::string_view id) const noexcept;
  const DateFormat& canonical() const noexcept { return canonical_; }

  /// Replaces the canonical pattern (pipeline override).
  void set_canonical(const std::string& pattern);

  const std::string& month_name(int month) const { return full_[month - 1]; }
  const std::string& month_abbr(int month) const { return abbr_[month - 1].front(); }
  /// Every accepted abbreviation; the first is used for rendering.
  const std::vector<std::string>& month_abbrs(int month) const { return abbr_[month - 1]; }

  bool operator==(const DateLocale&) const = default;

 private:
  std::string language_ = "en";
  int pivot_ = 50;
  std::array<std::string, 12> full_;
  std::array<std::vector<std::string>, 12> abbr_;
  std::vector<DateFormat> formats_;
  DateFormat canonical_;
};

DateFormat compile_date_format(std::string id, std::string pattern);

/// Throws NotADateError when no descriptor matches the whole string.
ParsedDate parse_date(std::string_view text, const DateLocale& locale);

/// Calendar shift. Day-absent dates shift their internal day (1 after
/// parsing), so shift(shift(d, k), -k) == d exactly.
ParsedDate shift_date(const ParsedDate& d, int days);

/// Renders `d` with the named descriptor. A descriptor that needs a day
/// applied to a day-absent date renders the canonical form instead.
std::string render_date(const ParsedDate& d, std::string_view descriptor, const DateLocale& locale);
std::string render_date(const ParsedDate& d, const DateLocale& locale);  // own descriptor

/// Canonical normal form; day-absent dates are written with day 1.
std::string canonical_date(const ParsedDate& d, const DateLocale& locale);

bool is_valid_date(int year, int month, int day) noexcept;

struct DayShiftPolicy {
  enum class Mode : std::uint8_t { FixedPerPatient, RandomInRange };
  Mode mode = Mode::RandomInRange;
  std::map<std::string, int> per_patient;
  /// Inclusive range. Also used by fixed mode for patients without an entry.
  int lo = -30;
  int hi = 30;
  std::uint64_t seed = 0;

  /// Throws ConfigError when lo > hi.
  void validate() const;

  /// `<patient-id> <signed days>` per line (tab, space or '=' separated).
  static std::map<std::string, int> parse_fixed(std::string_view content, const std::string& resource_name);
};

/// Pure function of (policy, patient_id).
int shift_for_patient(std::string_view patient_id, const DayShiftPolicy& policy);

}  // namespace deid
