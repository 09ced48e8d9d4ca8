#include <gtest/gtest.h>

#include <set>

#include "deid/error.hpp"
#include "deid/random.hpp"
#include "deid/recognize.hpp"

namespace deid {
namespace {

std::vector<EntityChunk> scan(const std::string& s, const Gazetteer& g) {
  const Text text(s);
  const auto analysis = analyze(text, HeuristicSentenceDetector());
  return gazetteer_scan(text, analysis.tokens, g, "gaz");
}

std::shared_ptr<const Gazetteer> make(Label label, std::vector<std::string> entries, bool cs = false,
                                      NameRole role = NameRole::None) {
  auto g = std::make_shared<Gazetteer>("test", label, cs);
  for (const auto& e : entries) g->add(e);
  g->role = role;
  return g;
}

RecognizerOutput run(const Recognizer& r, const std::string& s) {
  const Text text(s);
  const auto analysis = analyze(text, HeuristicSentenceDetector());
  return r.recognize(Document{"d", std::nullopt, s, "en"}, text, analysis.tokens);
}

TEST(Gazetteer, NoHits) {
  EXPECT_TRUE(scan("no phi here", *make(Label::Patient, {"Jane"})).empty());
}

TEST(Gazetteer, JaneSentence) {
  const std::string s = "Jane is a 48-year-old nurse from Memphis.";
  const PersonNameRecognizer names("names", Label::Patient, make(Label::Patient, {"Jane"}, true, NameRole::First),
                                   nullptr);
  const GazetteerRecognizer cities("cities", make(Label::City, {"Memphis"}, true));
  const auto a = run(names, s).chunks;
  const auto b = run(cities, s).chunks;
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].text, "Jane");
  EXPECT_EQ(a[0].label, Label::Patient);
  EXPECT_EQ(a[0].source, "names");
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].text, "Memphis");
  EXPECT_EQ(b[0].label, Label::City);
  EXPECT_EQ(b[0].span, (Span{33, 40}));
}

TEST(Gazetteer, LongestMatchWins) {
  const auto chunks =
      scan("Boston Children's Hospital", *make(Label::Hospital, {"Children's Hospital", "Boston Children's Hospital"}));
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].text, "Boston Children's Hospital");
}

TEST(Gazetteer, JohnAndHopkins) {
  const std::string s = "John was Diagnosed with Parkinson's by Dr. Hopkins";
  const PersonNameRecognizer names("names", Label::Patient, make(Label::Patient, {"John"}, true, NameRole::First),
                                   make(Label::Patient, {"Hopkins"}, true, NameRole::Last));
  const auto chunks = run(names, s).chunks;
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].text, "John");
  EXPECT_EQ(chunks[1].text, "Hopkins");
}

TEST(Gazetteer, TooManyTokensRejected) {
  Gazetteer g("test", Label::Hospital, false, 3);
  EXPECT_NO_THROW(g.add("Saint Mary Hospital"));
  EXPECT_THROW(g.add("Saint Mary General Hospital"), ConfigError);
  EXPECT_THROW(Gazetteer::parse("label=Hospital;case_sensitive=false;max_tokens=3\nA B C D\n", "h.txt"), ConfigError);
}

TEST(Gazetteer, CaseAndNormalization) {
  const auto icase = make(Label::Profession, {"Nurse"});
  EXPECT_EQ(scan("the NURSE said", *icase).size(), 1u);
  const auto cs = make(Label::City, {"Memphis"}, true);
  EXPECT_TRUE(scan("memphis", *cs).empty());
  // Decomposed "é" matches the precomposed entry.
  const auto accents = make(Label::City, {"Mérida"}, true);
  EXPECT_EQ(scan("to Me\xCC\x81rida today", *accents).size(), 1u);
}

TEST(Gazetteer, ParseHeader) {
  const auto g = Gazetteer::parse("label=Disease;case_sensitive=false;class=clinical;phi=false\nasthma\n", "d.txt");
  EXPECT_EQ(g.label(), Label::Disease);
  EXPECT_EQ(g.source_class, "clinical");
  EXPECT_FALSE(g.phi);
  EXPECT_THROW(Gazetteer::parse("case_sensitive=false\nx\n", "d.txt"), ConfigError);
  EXPECT_THROW(Gazetteer::parse("label=Bogus;case_sensitive=false\nx\n", "d.txt"), ConfigError);
  EXPECT_THROW(Gazetteer::parse("label=City;case_sensitive=false;colour=red\nx\n", "d.txt"), ConfigError);
}

// Every matching token window must be emitted or overlap an emitted window
// at least as long; emitted windows are matches and never overlap.
TEST(Gazetteer, MaximalMatchesAgainstEnumeration) {
  Rng rng(2024);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta"};
  for (int iter = 0; iter < 500; ++iter) {
    std::set<std::vector<std::string>> entries;
    Gazetteer g("g", Label::City, true, 4);
    const int n_entries = static_cast<int>(rng.between(1, 5));
    for (int e = 0; e < n_entries; ++e) {
      std::vector<std::string> phrase;
      std::string joined;
      for (int k = 0, len = static_cast<int>(rng.between(1, 3)); k < len; ++k) {
        phrase.push_back(words[rng.below(words.size())]);
        joined += (k ? " " : "") + phrase.back();
      }
      entries.insert(phrase);
      g.add(joined);
    }
    std::vector<std::string> toks;
    std::string s;
    for (int k = 0, n = static_cast<int>(rng.between(0, 12)); k < n; ++k) {
      toks.push_back(words[rng.below(words.size())]);
      s += (k ? " " : "") + toks.back();
    }
    std::vector<std::pair<std::size_t, std::size_t>> windows;  // [first, last) token indices
    for (std::size_t i = 0; i < toks.size(); ++i) {
      for (std::size_t j = i + 1; j <= toks.size(); ++j) {
        if (entries.count(std::vector<std::string>(toks.begin() + i, toks.begin() + j))) windows.push_back({i, j});
      }
    }
    // Token index → start offset.
    std::vector<std::size_t> starts;
    for (std::size_t k = 0, off = 0; k < toks.size(); ++k) {
      starts.push_back(off);
      off += toks[k].size() + 1;
    }
    auto to_window = [&](const EntityChunk& c) {
      const std::size_t a = std::find(starts.begin(), starts.end(), c.span.start) - starts.begin();
      std::size_t b = a;
      while (b < toks.size() && starts[b] < c.span.end) ++b;
      return std::make_pair(a, b);
    };
    const auto chunks = scan(s, g);
    std::vector<std::pair<std::size_t, std::size_t>> emitted;
    for (const auto& c : chunks) emitted.push_back(to_window(c));
    for (std::size_t k = 0; k < emitted.size(); ++k) {
      ASSERT_TRUE(std::find(windows.begin(), windows.end(), emitted[k]) != windows.end()) << s;
      if (k) ASSERT_LE(emitted[k - 1].second, emitted[k].first) << s;
    }
    for (const auto& w : windows) {
      bool dominated = false;
      for (const auto& e : emitted) {
        const bool overlap = e.first < w.second && w.first < e.second;
        dominated = dominated || (overlap && e.second - e.first >= w.second - w.first);
      }
      ASSERT_TRUE(dominated) << s;
    }
  }
}

TEST(PersonNames, FullNamesAndInitials) {
  const PersonNameRecognizer names("names", Label::Patient,
                                   make(Label::Patient, {"Jane", "John"}, true, NameRole::First),
                                   make(Label::Patient, {"Doe", "Smith"}, true, NameRole::Last));
  const auto chunks = run(names, "Jane Doe met John R. Smith and smith.").chunks;
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].text, "Jane Doe");
  EXPECT_EQ(chunks[1].text, "John R. Smith");
}

TEST(PersonNames, DoesNotCrossLines) {
  const PersonNameRecognizer names("names", Label::Patient, make(Label::Patient, {"Jane"}, true, NameRole::First),
                                   make(Label::Patient, {"Doe"}, true, NameRole::Last));
  const auto chunks = run(names, "Jane\nDoe").chunks;
  ASSERT_EQ(chunks.size(), 2u);
}

TEST(Patterns, TokenAligned) {
  const PatternRecognizer p("p", PatternRecognizer::parse(
                                     "pattern email label=Contact regex=/[a-z]+@[a-z]+\\.org/\n"
                                     "pattern digits label=ID regex=/\\d{3}/\n",
                                     "p.txt"));
  const auto chunks = run(p, "mail jdoe@example.org or 123 but not 12345").chunks;
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].text, "jdoe@example.org");
  EXPECT_EQ(chunks[0].label, Label::Contact);
  EXPECT_EQ(chunks[1].text, "123");
}

TEST(Patterns, BadRegexFailsAtLoad) {
  EXPECT_THROW(PatternRecognizer::parse("pattern bad label=ID regex=/([/\n", "p.txt"), ConfigError);
  EXPECT_THROW(PatternRecognizer::parse("pattern a label=ID regex=/a/\npattern a label=ID regex=/b/\n", "p.txt"),
               ConfigError);
}

TEST(Recognizers, Deterministic) {
  const GazetteerRecognizer cities("cities", make(Label::City, {"Memphis", "San Diego"}, true));
  const std::string s = "From San Diego to Memphis and back to San Diego.";
  EXPECT_EQ(run(cities, s).chunks, run(cities, s).chunks);
  EXPECT_EQ(run(cities, s).chunks.size(), 3u);
}

}  // namespace
}  // namespace deid
