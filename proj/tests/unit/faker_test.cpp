#include <gtest/gtest.h>

#include <set>

#include "deid/error.hpp"
#include "deid/faker.hpp"
#include "deid/random.hpp"
#include "deid/text.hpp"
#include "test_support.hpp"

namespace deid {
namespace {

const Faker& faker() { return test::english_pack()->faker(); }
NameVocabularies names() { return faker().names(); }

std::string first_token(const std::string& s) { return s.substr(0, s.find(' ')); }

EntityChunk chunk(std::string text, Label label) {
  EntityChunk c;
  c.text = std::move(text);
  c.span = {0, c.text.size()};
  c.label = label;
  return c;
}

// Textbook dynamic-programming distance, for comparison.
std::size_t naive_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

TEST(FakeName, FullNameThenBareFirstName) {
  auto ctx = PatientContext::make(1, "patient-1");
  const std::string full = fake_name("Jane Doe", ctx, Gender::Unknown, names());
  const std::string bare = fake_name("Jane", ctx, Gender::Unknown, names());
  EXPECT_NE(full, "Jane Doe");
  EXPECT_EQ(first_token(full), bare);
  EXPECT_EQ(fake_name("Jane Doe", ctx, Gender::Unknown, names()), full);
  EXPECT_EQ(fake_name("JANE DOE", ctx, Gender::Unknown, names()), to_upper(full));
  EXPECT_EQ(names().first->gender_of(bare), Gender::Feminine);
}

TEST(FakeName, TitlesAreKept) {
  auto ctx = PatientContext::make(1, "p");
  const std::string out = fake_name("Dr. Jane Doe", ctx, Gender::Unknown, names());
  EXPECT_EQ(out.rfind("Dr. ", 0), 0u);
  EXPECT_EQ(fake_name("Jane Doe", ctx, Gender::Unknown, names()), out.substr(4));
}

TEST(FakeName, CrossPatientIndependence) {
  std::set<std::string> seen;
  for (int i = 0; i < 50; ++i) {
    auto ctx = PatientContext::make(9, "patient-" + std::to_string(i));
    seen.insert(fake_name("Jane", ctx, Gender::Unknown, names()));
  }
  EXPECT_GT(seen.size(), 5u);
  // One patient's map does not depend on another patient having been processed.
  auto a = PatientContext::make(9, "patient-3");
  auto b = PatientContext::make(9, "patient-3");
  auto other = PatientContext::make(9, "patient-4");
  fake_name("Jane Doe", other, Gender::Unknown, names());
  EXPECT_EQ(fake_name("Jane", a, Gender::Unknown, names()), fake_name("Jane", b, Gender::Unknown, names()));
}

TEST(FakeName, ComponentConsistencyAndGender) {
  const auto& first = *names().first;
  const auto& last = *names().last;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto ctx = PatientContext::make(rng.next(), "p" + std::to_string(i));
    const auto& f = first.entries()[rng.below(first.size())];
    const auto& l = last.entries()[rng.below(last.size())];
    const std::string full = fake_name(f.text + " " + l.text, ctx, Gender::Unknown, names());
    const std::string bare = fake_name(f.text, ctx, Gender::Unknown, names());
    ASSERT_EQ(first_token(full), bare) << f.text << " " << l.text;
    ASSERT_NE(bare, f.text);
    if (f.gender != Gender::Unknown) ASSERT_EQ(first.gender_of(bare), f.gender) << f.text << " -> " << bare;
  }
}

TEST(FakeName, RequestedGenderForUnknownNames) {
  for (Gender g : {Gender::Feminine, Gender::Masculine}) {
    for (int i = 0; i < 200; ++i) {
      auto ctx = PatientContext::make(i, "p");
      const std::string out = fake_name("Zorblat", ctx, g, names());
      ASSERT_EQ(names().first->gender_of(out), g);
    }
  }
}

TEST(FakeName, SameLength) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    auto ctx = PatientContext::make(rng.next(), "p");
    const auto& f = names().first->entries()[rng.below(names().first->size())];
    const auto& l = names().last->entries()[rng.below(names().last->size())];
    const std::string in = f.text + " " + l.text;
    const std::string out = fake_name(in, ctx, Gender::Unknown, names(), LengthMode::SameLength);
    ASSERT_EQ(char_length(out), char_length(in)) << in << " -> " << out;
  }
}

TEST(FakeName, Determinism) {
  auto a = PatientContext::make(5, "x");
  auto b = PatientContext::make(5, "x");
  for (const char* n : {"John Smith", "Mary", "Dr. Lee", "K. Walker"}) {
    EXPECT_EQ(fake_name(n, a, Gender::Unknown, names()), fake_name(n, b, Gender::Unknown, names()));
  }
}

TEST(FakeAge, ExamplesAndClosure) {
  const AgeGroupTable table;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto ctx = PatientContext::make(seed, "p");
    const int a78 = fake_age(78, table, ctx);
    ASSERT_GE(a78, 60);
    ASSERT_LE(a78, 79);
    ASSERT_NE(a78, 78);
    const int a48 = fake_age(48, table, ctx);
    ASSERT_GE(a48, 40);
    ASSERT_LE(a48, 59);
    ASSERT_EQ(a48, fake_age(48, table, ctx));
  }
  const auto ctx = PatientContext::make(1, "p");
  for (int a = 0; a <= 120; ++a) {
    const int f = fake_age(a, table, ctx);
    ASSERT_EQ(table.group_of(f), table.group_of(a)) << a;
    ASSERT_NE(f, a);
    const int s = fake_age(a, table, ctx, true);
    ASSERT_EQ(std::to_string(s).size(), std::to_string(a).size()) << a;
  }
}

TEST(FakeAge, SingletonGroup) {
  const AgeGroupTable table({0, 1, 5});
  EXPECT_EQ(fake_age(0, table, PatientContext::make(1, "p")), 0);
  EXPECT_EQ(table.range_of(3), (std::pair{1, 4}));
  EXPECT_EQ(table.range_of(120), (std::pair{5, 120}));
}

TEST(AgeGroups, Parsing) {
  EXPECT_EQ(AgeGroupTable::parse("0,5,13,20,40,60,80"), AgeGroupTable());
  EXPECT_THROW(AgeGroupTable::parse("1,5"), ConfigError);
  EXPECT_THROW(AgeGroupTable::parse("0,5,5"), ConfigError);
  EXPECT_THROW(AgeGroupTable::parse("0,x"), ConfigError);
}

TEST(PickSurrogate, SameLengthAndNeverIdentity) {
  const auto* cities = faker().vocabulary(Label::City);
  ASSERT_NE(cities, nullptr);
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    auto ctx = PatientContext::make(rng.next(), "p");
    std::string text;
    const auto n = rng.between(1, 14);
    for (int k = 0; k < n; ++k) text.push_back(static_cast<char>(k == 0 ? 'A' + rng.below(26) : 'a' + rng.below(26)));
    const std::string out = pick_surrogate(chunk(text, Label::City), *cities, ctx, LengthMode::SameLength);
    ASSERT_EQ(char_length(out), char_length(text)) << text;
    ASSERT_NE(out, text);
  }
  for (const auto& e : cities->entries()) {
    auto ctx = PatientContext::make(4, "p");
    EXPECT_NE(pick_surrogate(chunk(e.text, Label::City), *cities, ctx, LengthMode::Free), e.text);
  }
}

TEST(PickSurrogate, MemphisExample) {
  const auto* cities = faker().vocabulary(Label::City);
  auto ctx = PatientContext::make(1, "p");
  const std::string out = pick_surrogate(chunk("Memphis", Label::City), *cities, ctx, LengthMode::SameLength);
  EXPECT_EQ(out.size(), 7u);
  EXPECT_TRUE(cities->contains(out)) << out;  // the 7-character bucket is not empty
  EXPECT_EQ(pick_surrogate(chunk("Memphis", Label::City), *cities, ctx, LengthMode::SameLength), out);
}

TEST(PickSurrogate, PadsWhenBucketEmpty) {
  SurrogateVocabulary v(Label::City);
  v.add("Fresno");
  auto ctx = PatientContext::make(1, "p");
  const std::string out = pick_surrogate(chunk("Memphis", Label::City), v, ctx, LengthMode::SameLength);
  EXPECT_EQ(out.size(), 7u);
  EXPECT_EQ(out.substr(0, 6), "Fresno");
}

TEST(Vocabulary, BucketsPartitionEntries) {
  for (Label l : {Label::City, Label::Country, Label::Profession}) {
    const auto* v = faker().vocabulary(l);
    ASSERT_NE(v, nullptr);
    std::size_t total = 0;
    for (const auto& [len, idx] : v->buckets()) {
      for (std::size_t i : idx) EXPECT_EQ(v->entries()[i].length, len);
      total += idx.size();
    }
    EXPECT_EQ(total, v->size());
  }
  const auto v = SurrogateVocabulary::parse("label=Name;part=first\nAnna\tf\tsv\nBo\tm\n", "v.tsv");
  EXPECT_EQ(v.part(), NamePart::First);
  EXPECT_EQ(v.count(Gender::Feminine), 1u);
  EXPECT_EQ(v.entries()[0].locale, "sv");
  EXPECT_THROW(SurrogateVocabulary::parse("Anna\n", "v.tsv"), ConfigError);
  EXPECT_THROW(SurrogateVocabulary::parse("label=Nope\nAnna\n", "v.tsv"), ConfigError);
}

TEST(Dictionary, OverridesAndFeedsNameMap) {
  UserDictionary d;
  d.add("Memphis", "Springfield");
  d.add("Jane", "Zelda", Label::Patient);
  EXPECT_EQ(lookup_override(chunk("Memphis", Label::City), d), "Springfield");
  EXPECT_EQ(lookup_override(chunk("Boston", Label::City), d), std::nullopt);
  EXPECT_EQ(lookup_override(chunk("Jane", Label::Doctor), d), std::nullopt);
  EXPECT_EQ(lookup_override(chunk("Memphis", Label::City), UserDictionary{}), std::nullopt);

  Faker with = faker();
  with.set_dictionary(d);
  auto ctx = PatientContext::make(1, "p");
  fake_name("Jane Doe", ctx, Gender::Unknown, names());
  EXPECT_EQ(with.surrogate(chunk("Jane", Label::Patient), ctx, LengthMode::Free), "Zelda");
  EXPECT_EQ(first_token(fake_name("Jane Doe", ctx, Gender::Unknown, names())), "Zelda");
  EXPECT_EQ(fake_name("Jane", ctx, Gender::Unknown, names()), "Zelda");
}

TEST(Dictionary, Parsing) {
  const auto d = UserDictionary::parse("# x\nMemphis\tSpringfield\nCity\tBoston\tGotham\n", "d.tsv");
  EXPECT_EQ(d.find("Memphis", Label::Hospital), "Springfield");
  EXPECT_EQ(d.find("Boston", Label::City), "Gotham");
  EXPECT_EQ(d.find("Boston", Label::Hospital), std::nullopt);
  EXPECT_THROW(UserDictionary::parse("only-one-column\n", "d.tsv"), ConfigError);
}

TEST(Surrogate, AgeKeepsSurroundingText) {
  auto ctx = PatientContext::make(1, "p");
  const auto out = faker().surrogate(chunk("48-year-old", Label::Age), ctx, LengthMode::Free);
  ASSERT_TRUE(out);
  EXPECT_TRUE(out->ends_with("-year-old"));
  const int v = std::stoi(*out);
  EXPECT_GE(v, 40);
  EXPECT_LE(v, 59);
  EXPECT_FALSE(faker().surrogate(chunk("elderly", Label::Age), ctx, LengthMode::Free));
}

TEST(Surrogate, ConsistentPerPatient) {
  auto ctx = PatientContext::make(2, "p");
  for (Label l : {Label::City, Label::Hospital, Label::Phone, Label::Id, Label::Username}) {
    const auto a = faker().surrogate(chunk("Value 123", l), ctx, LengthMode::Free);
    EXPECT_EQ(faker().surrogate(chunk("Value 123", l), ctx, LengthMode::Free), a);
  }
}

TEST(ShapeSurrogate, KeepsShape) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const auto n = rng.between(1, 20);
    static const std::string alphabet = "aZ09-() ./@x";
    for (int k = 0; k < n; ++k) s.push_back(alphabet[rng.below(alphabet.size())]);
    const std::string out = shape_surrogate(s, rng.next());
    ASSERT_EQ(out.size(), s.size());
    bool any = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const char a = s[k], b = out[k];
      any = any || std::isalnum(static_cast<unsigned char>(a));
      if (std::isdigit(static_cast<unsigned char>(a))) ASSERT_TRUE(std::isdigit(static_cast<unsigned char>(b)));
      else if (std::isupper(static_cast<unsigned char>(a))) ASSERT_TRUE(std::isupper(static_cast<unsigned char>(b)));
      else if (std::islower(static_cast<unsigned char>(a))) ASSERT_TRUE(std::islower(static_cast<unsigned char>(b)));
      else ASSERT_EQ(a, b);
    }
    if (any) ASSERT_NE(out, s);
  }
}

TEST(Levenshtein, MatchesTextbookDefinition) {
  EXPECT_EQ(levenshtein(U"kitten", U"sitting"), 3u);
  EXPECT_EQ(levenshtein(U"", U"abc"), 3u);
  Rng rng(6);
  for (int i = 0; i < 2000; ++i) {
    std::u32string a, b;
    for (auto n = rng.below(8); n > 0; --n) a.push_back(U'a' + static_cast<char32_t>(rng.below(3)));
    for (auto n = rng.below(8); n > 0; --n) b.push_back(U'a' + static_cast<char32_t>(rng.below(3)));
    ASSERT_EQ(levenshtein(a, b), naive_distance(a, b));
  }
}

TEST(Faker, Validation) {
  Faker f;
  SurrogateVocabulary first(Label::Name, NamePart::First);
  first.add("Anna", Gender::Feminine);
  f.add_vocabulary(first);
  EXPECT_THROW(f.validate(), ConfigError);
  EXPECT_THROW(f.add_vocabulary(first), ConfigError);
  EXPECT_NO_THROW(faker().validate());
}

TEST(Titles, LongestLeadingTitle) {
  const auto t = TitleList::parse("Dr.\tu\nMrs.\tf\nMr.\tm\n", "t.tsv");
  const auto m = t.leading(U"Mrs. Smith");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->length, 5u);
  EXPECT_EQ(m->gender, Gender::Feminine);
  EXPECT_FALSE(t.leading(U"Drake"));
}

}  // namespace
}  // namespace deid
