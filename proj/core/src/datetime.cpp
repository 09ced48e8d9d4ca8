#include "deid/datetime.hpp"

#include <chrono>
#include <cstdio>

#include "deid/error.hpp"
#include "deid/random.hpp"
#include "deid/text.hpp"
#include "line_format.hpp"

namespace deid {
namespace {

constexpr std::string_view kEnglishTable = R"(# English month names and surface formats
pivot 50
canonical {MM}/{D}/{YYYY}
month 1 January Jan
month 2 February Feb
month 3 March Mar
month 4 April Apr
month 5 May May
month 6 June Jun
month 7 July Jul
month 8 August Aug
month 9 September Sep Sept
month 10 October Oct
month 11 November Nov
month 12 December Dec
format MM/DD/YYYY {MM}/{DD}/{YYYY}
format M/D/YYYY {M}/{D}/{YYYY}
format MM/D/YYYY {MM}/{D}/{YYYY}
format M/DD/YYYY {M}/{DD}/{YYYY}
format MM/DD/YY {MM}/{DD}/{YY}
format M/D/YY {M}/{D}/{YY}
format MM-DD-YYYY {MM}-{DD}-{YYYY}
format M-D-YYYY {M}-{D}-{YYYY}
format YYYY-MM-DD {YYYY}-{MM}-{DD}
format YYYY/MM/DD {YYYY}/{MM}/{DD}
format DDMonYYYY {DD}{Mon}{YYYY}
format DMonYYYY {D}{Mon}{YYYY}
format DD-Mon-YYYY {DD}-{Mon}-{YYYY}
format D-Mon-YYYY {D}-{Mon}-{YYYY}
format MONTHNAME-D-YYYY {Month} {D}, {YYYY}
format Mon-D-YYYY {Mon} {D}, {YYYY}
format Mon.-D-YYYY {Mon}. {D}, {YYYY}
format D-MONTHNAME-YYYY {D} {Month} {YYYY}
format D-Mon-YYYY-SP {D} {Mon} {YYYY}
format MONTHNAME-YYYY {Month} {YYYY}
format Mon-YYYY {Mon} {YYYY}
format MM/YYYY {MM}/{YYYY}
format M/YYYY {M}/{YYYY}
)";

using Field = DateFormat::Field;

bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

struct Fields {
  int year = -1;
  int month = -1;
  int day = -1;
  MonthCase month_case = MonthCase::Title;
};

MonthCase case_of(std::u32string_view s) {
  bool any_upper = false, any_lower = false;
  std::size_t letters = 0;
  for (char32_t c : s) {
    if (!is_letter(c)) continue;
    ++letters;
    any_upper |= is_upper(c);
    any_lower |= is_lower(c);
  }
  if (letters > 1 && any_upper && !any_lower) return MonthCase::Upper;
  if (any_lower && !any_upper) return MonthCase::Lower;
  return MonthCase::Title;
}

bool equal_icase(std::u32string_view a, std::u32string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (to_lower(a[i]) != to_lower(b[i])) return false;
  }
  return true;
}

class Matcher {
 public:
  Matcher(const DateFormat& f, std::u32string_view s, const DateLocale& loc,
          const std::array<std::u32string, 12>& full, const std::array<std::vector<std::u32string>, 12>& abbr)
      : f_(f), s_(s), loc_(loc), full_(full), abbr_(abbr) {}

  bool run(Fields& out) { return step(0, 0, Fields{}, out); }

 private:
  // Parses `len` ASCII digits at pos, or -1.
  int digits(std::size_t pos, std::size_t len) const {
    if (pos + len > s_.size()) return -1;
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (!is_ascii_digit(s_[pos + i])) return -1;
      v = v * 10 + static_cast<int>(s_[pos + i] - U'0');
    }
    return v;
  }

  bool step(std::size_t pi, std::size_t pos, Fields acc, Fields& out) const {
    if (pi == f_.pieces.size()) {
      if (pos != s_.size() || acc.year < 0 || acc.month < 0) return false;
      if (acc.day >= 0 && !is_valid_date(acc.year, acc.month, acc.day)) return false;
      out = acc;
      return true;
    }
    const auto& piece = f_.pieces[pi];
    switch (piece.field) {
      case Field::Literal:
        if (s_.substr(pos, piece.literal.size()) != piece.literal) return false;
        return step(pi + 1, pos + piece.literal.size(), acc, out);
      case Field::Year4: {
        const int v = digits(pos, 4);
        if (v < 1) return false;
        acc.year = v;
        return step(pi + 1, pos + 4, acc, out);
      }
      case Field::Year2: {
        const int v = digits(pos, 2);
        if (v < 0) return false;
        acc.year = v <= loc_.pivot() ? 2000 + v : 1900 + v;
        return step(pi + 1, pos + 2, acc, out);
      }
      case Field::Month2:
      case Field::Day2: {
        const int v = digits(pos, 2);
        const int hi = piece.field == Field::Month2 ? 12 : 31;
        if (v < 1 || v > hi) return false;
        (piece.field == Field::Month2 ? acc.month : acc.day) = v;
        return step(pi + 1, pos + 2, acc, out);
      }
      case Field::Month1:
      case Field::Day1: {
        const int hi = piece.field == Field::Month1 ? 12 : 31;
        for (std::size_t len : {2u, 1u}) {
          const int v = digits(pos, len);
          if (v < 1 || v > hi || s_[pos] == U'0') continue;
          Fields next = acc;
          (piece.field == Field::Month1 ? next.month : next.day) = v;
          if (step(pi + 1, pos + len, next, out)) return true;
        }
        return false;
      }
      case Field::MonthName:
      case Field::MonthAbbr:
        for (int m = 0; m < 12; ++m) {
          auto try_name = [&](const std::u32string& name) {
            const auto surface = s_.substr(pos, name.size());
            if (!equal_icase(surface, name)) return false;
            Fields next = acc;
            next.month = m + 1;
            next.month_case = case_of(surface);
            return step(pi + 1, pos + name.size(), next, out);
          };
          if (piece.field == Field::MonthName) {
            if (try_name(full_[m])) return true;
          } else {
            for (const auto& a : abbr_[m]) {
              if (try_name(a)) return true;
            }
          }
        }
        return false;
    }
    return false;
  }

  const DateFormat& f_;
  std::u32string_view s_;
  const DateLocale& loc_;
  const std::array<std::u32string, 12>& full_;
  const std::array<std::vector<std::u32string>, 12>& abbr_;
};

std::string with_case(const std::string& name, MonthCase mc) {
  switch (mc) {
    case MonthCase::Upper: return to_upper(name);
    case MonthCase::Lower: return to_lower(name);
    case MonthCase::Title: return name;
  }
  return name;
}

std::string pad2(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string render_with(const ParsedDate& d, const DateFormat& f, const DateLocale& loc, int day) {
  std::string out;
  for (const auto& p : f.pieces) {
    switch (p.field) {
      case Field::Literal: out += to_utf8(p.literal); break;
      case Field::Year4: {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d", d.year);
        out += buf;
        break;
      }
      case Field::Year2: out += pad2(((d.year % 100) + 100) % 100); break;
      case Field::Month2: out += pad2(d.month); break;
      case Field::Month1: out += std::to_string(d.month); break;
      case Field::Day2: out += pad2(day); break;
      case Field::Day1: out += std::to_string(day); break;
      case Field::MonthName: out += with_case(loc.month_name(d.month), d.month_case); break;
      case Field::MonthAbbr: out += with_case(loc.month_abbr(d.month), d.month_case); break;
    }
  }
  return out;
}

}  // namespace

bool DateFormat::needs_day() const noexcept {
  for (const auto& p : pieces) {
    if (p.field == Field::Day1 || p.field == Field::Day2) return true;
  }
  return false;
}

bool DateFormat::needs_month() const noexcept {
  for (const auto& p : pieces) {
    if (p.field == Field::Month1 || p.field == Field::Month2 || p.field == Field::MonthName ||
        p.field == Field::MonthAbbr)
      return true;
  }
  return false;
}

DateFormat compile_date_format(std::string id, std::string pattern) {
  static const std::map<std::string, Field, std::less<>> placeholders = {
      {"YYYY", Field::Year4}, {"YY", Field::Year2}, {"MM", Field::Month2},       {"M", Field::Month1},
      {"DD", Field::Day2},    {"D", Field::Day1},   {"Month", Field::MonthName}, {"Mon", Field::MonthAbbr},
  };
  DateFormat f;
  f.id = std::move(id);
  f.pattern = std::move(pattern);
  const std::u32string p = to_u32(f.pattern);
  int years = 0, months = 0, days = 0;
  std::u32string literal;
  for (std::size_t i = 0; i < p.size();) {
    if (p[i] == U'{') {
      const std::size_t close = p.find(U'}', i);
      if (close == std::u32string::npos) throw ConfigError("unterminated placeholder in date format '" + f.id + "'");
      const std::string name = to_utf8(p.substr(i + 1, close - i - 1));
      const auto it = placeholders.find(name);
      if (it == placeholders.end()) throw ConfigError("unknown placeholder {" + name + "} in date format '" + f.id + "'");
      if (!literal.empty()) f.pieces.push_back({Field::Literal, std::exchange(literal, {})});
      f.pieces.push_back({it->second, {}});
      switch (it->second) {
        case Field::Year4:
        case Field::Year2: ++years; break;
        case Field::Day1:
        case Field::Day2: ++days; break;
        default: ++months; break;
      }
      i = close + 1;
    } else {
      literal.push_back(p[i++]);
    }
  }
  if (!literal.empty()) f.pieces.push_back({Field::Literal, literal});
  if (years != 1 || months != 1 || days > 1) {
    throw ConfigError("date format '" + f.id + "' needs exactly one year, one month and at most one day field");
  }
  return f;
}

const DateLocale& DateLocale::english() {
  static const DateLocale en = parse(kEnglishTable, "builtin:en-dates", "en");
  return en;
}

DateLocale DateLocale::parse(std::string_view content, const std::string& resource_name, std::string language) {
  DateLocale loc;
  loc.language_ = std::move(language);
  std::array<bool, 12> seen{};
  bool have_canonical = false;
  for (const auto& line : detail::content_lines(content)) {
    std::vector<std::string> words;
    std::string_view rest = line.text;
    const std::size_t sp = rest.find_first_of(" \t");
    const std::string keyword(rest.substr(0, sp));
    rest = sp == std::string_view::npos ? std::string_view{} : detail::trim(rest.substr(sp));
    try {
      if (keyword == "pivot") {
        const long long v = detail::parse_int(rest, resource_name, line.number);
        if (v < 0 || v > 99) throw ConfigError(resource_name, line.number, "pivot must be in 0..99");
        loc.pivot_ = static_cast<int>(v);
      } else if (keyword == "canonical") {
        loc.canonical_ = compile_date_format("CANONICAL", std::string(rest));
        have_canonical = true;
      } else if (keyword == "month") {
        while (!rest.empty()) {
          const std::size_t s2 = rest.find_first_of(" \t");
          words.emplace_back(rest.substr(0, s2));
          if (s2 == std::string_view::npos) break;
          rest = detail::trim(rest.substr(s2));
        }
        if (words.size() < 3) throw ConfigError(resource_name, line.number, "expected 'month <n> <name> <abbr>...'");
        const long long m = detail::parse_int(words[0], resource_name, line.number);
        if (m < 1 || m > 12) throw ConfigError(resource_name, line.number, "month number out of range");
        if (seen[m - 1]) throw ConfigError(resource_name, line.number, "month " + words[0] + " defined twice");
        seen[m - 1] = true;
        loc.full_[m - 1] = words[1];
        loc.abbr_[m - 1].assign(words.begin() + 2, words.end());
      } else if (keyword == "format") {
        const std::size_t s2 = rest.find_first_of(" \t");
        if (s2 == std::string_view::npos) throw ConfigError(resource_name, line.number, "expected 'format <id> <pattern>'");
        const std::string id(rest.substr(0, s2));
        if (loc.find_format(id)) throw ConfigError(resource_name, line.number, "duplicate format id '" + id + "'");
        loc.formats_.push_back(compile_date_format(id, std::string(detail::trim(rest.substr(s2)))));
      } else {
        throw ConfigError(resource_name, line.number, "unknown directive '" + keyword + "'");
      }
    } catch (const ConfigError& e) {
      if (e.line() > 0) throw;
      throw ConfigError(resource_name, line.number, e.what());
    } catch (const EncodingError& e) {
      throw ConfigError(resource_name, line.number, e.what());
    }
  }
  for (int m = 0; m < 12; ++m) {
    if (!seen[m]) throw ConfigError(resource_name, 0, "month " + std::to_string(m + 1) + " is not defined");
  }
  if (loc.formats_.empty()) throw ConfigError(resource_name, 0, "no date formats defined");
  if (!have_canonical) throw ConfigError(resource_name, 0, "no canonical format defined");
  return loc;
}

DateLocale DateLocale::load(const std::string& path, std::string language) {
  return parse(detail::read_file(path), path, std::move(language));
}

const DateFormat* DateLocale::find_format(std::string_view id) const noexcept {
  for (const auto& f : formats_) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

void DateLocale::set_canonical(const std::string& pattern) { canonical_ = compile_date_format("CANONICAL", pattern); }

bool is_valid_date(int year, int month, int day) noexcept {
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  return std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                     std::chrono::day{static_cast<unsigned>(day)}}
      .ok();
}

ParsedDate parse_date(std::string_view text, const DateLocale& locale) {
  std::u32string s;
  try {
    s = to_u32(text);
  } catch (const EncodingError&) {
    throw NotADateError("not a date: invalid UTF-8");
  }
  std::array<std::u32string, 12> full;
  std::array<std::vector<std::u32string>, 12> abbr;
  for (int m = 1; m <= 12; ++m) {
    full[m - 1] = to_u32(locale.month_name(m));
    for (const auto& a : locale.month_abbrs(m)) abbr[m - 1].push_back(to_u32(a));
  }
  for (const auto& f : locale.formats()) {
    Fields got;
    if (!Matcher(f, s, locale, full, abbr).run(got)) continue;
    ParsedDate d;
    d.year = got.year;
    d.month = got.month;
    d.has_day = got.day >= 0;
    d.day = d.has_day ? got.day : 1;
    d.format_descriptor = f.id;
    d.locale = locale.language();
    d.month_case = got.month_case;
    return d;
  }
  throw NotADateError("not a date: '" + std::string(text) + "'");
}

ParsedDate shift_date(const ParsedDate& d, int days) {
  using namespace std::chrono;
  const sys_days base = year_month_day{year{d.year}, month{static_cast<unsigned>(d.month)},
                                       day{static_cast<unsigned>(d.day)}};
  const year_month_day ymd{base + std::chrono::days{days}};
  ParsedDate out = d;
  out.year = static_cast<int>(ymd.year());
  out.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  out.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  return out;
}

std::string render_date(const ParsedDate& d, std::string_view descriptor, const DateLocale& locale) {
  const DateFormat* f = locale.find_format(descriptor);
  if (!f || (f->needs_day() && !d.has_day)) return canonical_date(d, locale);
  return render_with(d, *f, locale, d.day);
}

std::string render_date(const ParsedDate& d, const DateLocale& locale) {
  return render_date(d, d.format_descriptor, locale);
}

std::string canonical_date(const ParsedDate& d, const DateLocale& locale) {
  return render_with(d, locale.canonical(), locale, d.has_day ? d.day : 1);
}

void DayShiftPolicy::validate() const {
  if (lo > hi) throw ConfigError("day-shift range has lo > hi (" + std::to_string(lo) + " > " + std::to_string(hi) + ")");
}

std::map<std::string, int> DayShiftPolicy::parse_fixed(std::string_view content, const std::string& resource_name) {
  std::map<std::string, int> out;
  for (const auto& line : detail::content_lines(content)) {
    const std::size_t sep = line.text.find_last_of(" \t=");
    if (sep == std::string_view::npos) throw ConfigError(resource_name, line.number, "expected '<patient-id> <days>'");
    const std::string id(detail::trim(line.text.substr(0, sep)));
    std::string_view value = detail::trim(line.text.substr(sep + 1));
    if (!value.empty() && value.front() == '+') value.remove_prefix(1);
    if (id.empty()) throw ConfigError(resource_name, line.number, "missing patient id");
    const long long days = detail::parse_int(value, resource_name, line.number);
    if (!out.emplace(id, static_cast<int>(days)).second) {
      throw ConfigError(resource_name, line.number, "duplicate patient id '" + id + "'");
    }
  }
  return out;
}

int shift_for_patient(std::string_view patient_id, const DayShiftPolicy& policy) {
  if (policy.mode == DayShiftPolicy::Mode::FixedPerPatient) {
    if (auto it = policy.per_patient.find(std::string(patient_id)); it != policy.per_patient.end()) return it->second;
  }
  Rng rng(keyed_hash(policy.seed, "day-shift", patient_id));
  return static_cast<int>(rng.between(policy.lo, policy.hi));
}

}  // namespace deid
