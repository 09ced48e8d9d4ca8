// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <boost/date_time/gregorian/gregorian.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "date_golden.hpp"
#include "deid/datetime.hpp"
#include "deid/error.hpp"
#include "deid/eval.hpp"
#include "deid/faker.hpp"
#include "deid/merge.hpp"
#include "deid/pipeline.hpp"
#include "deid/random.hpp"
#include "deid/runner.hpp"
#include "deid/synth.hpp"
#include "deid/text.hpp"
#include "eval_fixture.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace deid;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::string kJane = "Jane is a 48-year-old nurse from Memphis.";

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::size_t cases = 0;
  void expect(bool ok, const std::string& what) {
    ++cases;
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void write_corpus(const fs::path& dir, const synth::Corpus& c) {
  fs::create_directories(dir);
  for (const auto& d : c.documents) {
    std::ofstream(dir / d.id, std::ios::binary) << d.text;
    std::ofstream(dir / (d.id + ".meta"), std::ios::binary) << "patient_id=" << *d.patient_id << "\n";
  }
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(dir).generic_string()] = slurp(e.path());
  }
  return out;
}

Pipeline pipeline(RewriteMode mode, std::optional<std::uint64_t> seed = std::nullopt) {
  PipelineOptions opt;
  opt.rewrite.mode = mode;
  opt.seed = seed;
  return Pipeline(test::english_pack(), opt);
}

// 1 -------------------------------------------------------------------------
std::string criterion1(Check& c) {
  const auto t0 = Clock::now();
  auto run = [](RewritePolicy pol) {
    PipelineOptions opt;
    opt.rewrite = std::move(pol);
    return Pipeline(test::english_pack(), opt).process(Document{"d", std::nullopt, kJane, "en"}).rewritten.text;
  };
  RewritePolicy entity;
  RewritePolicy fixed;
  fixed.mode = RewriteMode::MaskFixed;
  fixed.fixed_mask_width = 3;
  RewritePolicy whitelisted = fixed;
  whitelisted.whitelist = {Label::Age};
  const std::string a = run(entity), b = run(fixed), w = run(whitelisted);
  c.expect(a == "PATIENT is a AGE PROFESSION from CITY.", "mask-entity gave '" + a + "'");
  c.expect(b == "*** is a *** *** from ***.", "mask-fixed gave '" + b + "'");
  c.expect(w == "*** is a 48-year-old *** from ***.", "whitelist gave '" + w + "'");
  const double s = seconds_since(t0);
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
  return "3 outputs byte-exact in " + std::to_string(s) + " s";
}

// 2 -------------------------------------------------------------------------
std::string criterion2(Check& c) {
  const auto& faker = test::english_pack()->faker();
  const auto* cities = faker.vocabulary(Label::City);
  const auto names = faker.names();
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    for (LengthMode lm : {LengthMode::Free, LengthMode::SameLength}) {
      PipelineOptions opt;
      opt.rewrite.mode = RewriteMode::Obfuscate;
      opt.rewrite.length_mode = lm;
      opt.seed = seed;
      const auto r = Pipeline(test::english_pack(), opt).process(Document{"d", std::nullopt, kJane, "en"});
      const auto& reps = r.rewritten.replacements;
      const std::string tag = "seed " + std::to_string(seed) + ": '" + r.rewritten.text + "'";
      c.expect(reps.size() == 4, tag + " has " + std::to_string(reps.size()) + " replacements");
      if (reps.size() != 4) continue;
      for (const auto& rep : reps) c.expect(rep.replacement != rep.chunk.text, tag + " kept " + rep.chunk.text);
      c.expect(names.first->gender_of(reps[0].replacement) == Gender::Feminine, tag + " name not feminine");
      const int age = std::atoi(reps[1].replacement.c_str());
      c.expect(age >= 40 && age <= 59 && reps[1].replacement.ends_with("-year-old"), tag + " age out of group");
      if (lm == LengthMode::Free) {
        c.expect(cities->contains(reps[3].replacement), tag + " city not from vocabulary");
      } else {
        c.expect(char_length(r.rewritten.text) == char_length(kJane), tag + " length changed");
      }
    }
  }
  return std::to_string(c.cases) + " checks over 200 seeds, free and same-length";
}

// 3 -------------------------------------------------------------------------
std::string criterion3(Check& c) {
  const auto t0 = Clock::now();
  test::TempDir dir("accept3");
  const auto corpus = synth::generate_corpus(240, 2024);
  write_corpus(dir.path() / "in", corpus);
  std::size_t docs = 0;
  for (RewriteMode mode : {RewriteMode::MaskEntity, RewriteMode::MaskFixed, RewriteMode::MaskSameLength,
                           RewriteMode::Obfuscate}) {
    const std::string name(rewrite_mode_name(mode));
    RunConfig de;
    de.input = dir.path() / "in";
    de.output = dir.path() / ("out-" + name);
    de.vault = dir.path() / ("vault-" + name);
    de.jobs = 2;
    const auto s = deidentify_corpus(pipeline(mode, 77), de);
    c.expect(s.ok() && s.documents == corpus.documents.size(), name + ": deidentify failed");
    RunConfig re;
    re.input = de.output;
    re.output = dir.path() / ("back-" + name);
    re.vault = de.vault;
    const auto r = reidentify_corpus(re);
    c.expect(r.ok(), name + ": reidentify failed");
    for (const auto& d : corpus.documents) {
      c.expect(slurp(re.output / d.id) == d.text, name + ": " + d.id + " differs");
      ++docs;
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < 30.0, "took " + std::to_string(s) + " s");
  return std::to_string(docs) + " document round trips (240 docs x 4 modes) in " + std::to_string(s) + " s";
}

// 4 -------------------------------------------------------------------------
std::string criterion4(Check& c) {
  const auto& faker = test::english_pack()->faker();
  const auto names = faker.names();
  const auto& first = *names.first;
  const auto& last = *names.last;
  const auto& dates = test::english_pack()->dates();
  Rng rng(4);
  constexpr int kCases = 1000;
  std::map<std::string, std::size_t> per_property;
  auto expect = [&](const std::string& property, bool ok, const std::string& what) {
    ++per_property[property];
    c.expect(ok, property + ": " + what);
  };
  auto full_name = [&] {
    return first.entries()[rng.below(first.size())].text + " " + last.entries()[rng.below(last.size())].text;
  };

  for (int i = 0; i < kCases; ++i) {
    const std::uint64_t seed = rng.next();
    const std::string pid = "p" + std::to_string(i);
    const std::string name = full_name();

    // Name consistency: repeated occurrences, as across documents of one patient.
    auto ctx = PatientContext::make(seed, pid);
    const std::string s1 = fake_name(name, ctx, Gender::Unknown, names);
    fake_name(full_name(), ctx, Gender::Unknown, names);
    const std::string s2 = fake_name(name, ctx, Gender::Unknown, names);
    expect("name-consistency", s1 == s2, name + " -> " + s1 + " / " + s2);

    // Cross-patient independence: another patient's history changes nothing.
    auto fresh = PatientContext::make(seed, pid);
    auto other = PatientContext::make(seed, pid + "-other");
    fake_name(name, other, Gender::Unknown, names);
    fake_name(full_name(), other, Gender::Unknown, names);
    expect("cross-patient", fake_name(name, fresh, Gender::Unknown, names) == s1, name);

    // Component consistency: the bare first name follows the full name.
    const std::string bare = name.substr(0, name.find(' '));
    const std::string sb = fake_name(bare, ctx, Gender::Unknown, names);
    expect("component", s1.substr(0, s1.find(' ')) == sb, name + " -> " + s1 + " but " + bare + " -> " + sb);

    // Gender preservation.
    const auto g = first.gender_of(bare);
    if (g && *g != Gender::Unknown) expect("gender", first.gender_of(sb) == g, bare + " -> " + sb);
    const Gender want = rng.below(2) ? Gender::Feminine : Gender::Masculine;
    auto unk = PatientContext::make(seed, pid);
    const std::string su = fake_name("Xqzt", unk, want, names);
    expect("gender", first.gender_of(su) == want, "requested gender for unknown name -> " + su);

    // Age-group closure, default and random tables.
    const int age = static_cast<int>(rng.between(0, 110));
    const AgeGroupTable def;
    expect("age-group", def.group_of(fake_age(age, def, ctx)) == def.group_of(age), std::to_string(age));
    std::vector<int> bounds = {0};
    for (int k = static_cast<int>(rng.between(0, 6)); k > 0; --k) bounds.push_back(bounds.back() + 1 + rng.below(20));
    const AgeGroupTable random_table(bounds);
    expect("age-group", random_table.group_of(fake_age(age, random_table, ctx)) == random_table.group_of(age),
           std::to_string(age) + " with random table");

    // Day-shift determinism per patient.
    DayShiftPolicy pol;
    pol.lo = static_cast<int>(rng.between(-400, 0));
    pol.hi = static_cast<int>(rng.between(0, 400));
    pol.seed = seed;
    const int k1 = shift_for_patient(pid, pol);
    expect("shift-determinism", k1 == shift_for_patient(pid, pol) && k1 >= pol.lo && k1 <= pol.hi, pid);

    // Date format class and inverse under shift.
    const auto& row = test::kDateGolden[rng.below(test::kDateGolden.size())];
    const ParsedDate d = parse_date(row.surface, dates);
    const ParsedDate sd = shift_date(d, k1);
    // "7Jul2015" and "13Jul2015" read back under different descriptors, so the
    // surface check is that the reparsed value renders identically in the
    // original descriptor.
    const std::string shifted = render_date(sd, dates);
    expect("format-class", sd.format_descriptor == d.format_descriptor &&
                               render_date(parse_date(shifted, dates), d.format_descriptor, dates) == shifted,
           std::string(row.surface) + " shifted by " + std::to_string(k1));
    expect("shift-inverse", shift_date(sd, -k1) == d, std::string(row.surface));
  }
  std::string summary;
  for (const auto& [p, n] : per_property) summary += p + "=" + std::to_string(n) + " ";
  for (const auto& [p, n] : per_property) c.expect(n >= static_cast<std::size_t>(kCases), p + " ran too few cases");
  return summary + "violations=" + std::to_string(c.failures.size());
}

// 5 -------------------------------------------------------------------------
EntityChunk random_chunk(Rng& rng) {
  static const std::vector<std::string> sources = {"a", "b", "c"};
  static const std::vector<std::string> classes = {"ner", "rules", "clinical", "other"};
  EntityChunk ch;
  const auto s = rng.below(20);
  ch.span = {s, s + 1 + rng.below(6)};
  ch.label = rng.below(8) == 0 ? Label::Disease : static_cast<Label>(rng.below(13));
  ch.phi = ch.label != Label::Disease;
  ch.source = sources[rng.below(3)];
  ch.source_class = classes[rng.below(4)];
  ch.confidence = static_cast<double>(rng.between(1, 4)) / 4.0;
  ch.text = std::string(ch.span.length(), 'x');
  return ch;
}

std::string criterion5(Check& c) {
  Rng rng(5);
  std::vector<TieBreak> all = {TieBreak::LongerSpan, TieBreak::HigherConfidence, TieBreak::EarlierStart,
                               TieBreak::LexicographicSource};
  for (int i = 0; i < 10000; ++i) {
    MergePolicy p;
    p.set_default(static_cast<int>(rng.between(0, 3)));
    for (const char* cls : {"ner", "rules", "clinical"}) {
      if (rng.below(2)) p.set_priority(cls, std::nullopt, static_cast<int>(rng.between(0, 3)));
      if (rng.below(2)) p.set_priority(cls, static_cast<Label>(rng.below(13)), static_cast<int>(rng.between(0, 3)));
    }
    auto order = all;
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    order.resize(rng.between(0, 4));
    p.set_tie_break(order);
    std::vector<EntityChunk> chunks;
    for (auto n = rng.between(0, 10); n > 0; --n) chunks.push_back(random_chunk(rng));
    const auto got = merge(chunks, p);
    const auto want = oracle::brute_force_merge(chunks, p);
    c.expect(got.chunks == want.chunks && got.suppressors == want.suppressors, "instance " + std::to_string(i));
  }
  const auto d = Pipeline(test::english_pack())
                     .detect(Document{"d", std::nullopt,
                                      "John was Diagnosed with Parkinson's by Dr. Hopkins at John Hopkins Hospital.",
                                      "en"});
  std::set<std::pair<Label, std::string>> phi;
  for (const auto& ch : d.merged.chunks) phi.insert({ch.label, ch.text});
  const std::set<std::pair<Label, std::string>> want = {
      {Label::Patient, "John"}, {Label::Doctor, "Hopkins"}, {Label::Hospital, "John Hopkins Hospital"}};
  c.expect(phi == want, "John/Parkinson's scenario gave a different PHI set");
  for (const auto& ch : d.merged.chunks) c.expect(ch.text.find("Parkinson") == std::string::npos, "Parkinson in PHI");
  return "10000 random instances equal the brute-force resolver; scenario PHI = {Patient John, Doctor Hopkins, "
         "Hospital John Hopkins Hospital}";
}

// 6 -------------------------------------------------------------------------
std::string criterion6(Check& c) {
  const double cov = coverage(Span{7, 26}, Span{0, 26});
  const std::vector<Annotation> p = {{"d", {7, 26}, Label::Hospital}}, g = {{"d", {0, 26}, Label::Hospital}};
  c.expect(std::abs(cov - 19.0 / 26.0) < 1e-12 && match_chunks(p, g, MatchSpec{}).matched == 1,
           "Children's Hospital did not match");

  Rng rng(6);
  const std::vector<MatchSpec> specs = {MatchSpec{}, MatchSpec::parse_mode("coverage:0.3"),
                                        MatchSpec::parse_mode("token")};
  std::size_t instances = 0;
  for (int i = 0; i < 20000; ++i) {
    std::vector<Annotation> gold, pred;
    std::size_t pos = 0;
    for (auto n = rng.below(9); n > 0; --n) {
      const std::size_t s = pos + rng.below(4), e = s + 1 + rng.below(8);
      gold.push_back({"d", {s, e}, rng.below(3) ? Label::City : Label::Date});
      pos = e;
    }
    for (auto n = rng.below(9); n > 0; --n) {
      const std::size_t s = rng.below(30);
      pred.push_back({"d", {s, s + 1 + rng.below(8)}, rng.below(3) ? Label::City : Label::Date});
    }
    const auto& spec = specs[rng.below(specs.size())];
    const bool ignore = rng.below(2);
    c.expect(match_chunks(pred, gold, spec, ignore).matched == oracle::exhaustive_matches(pred, gold, spec, ignore),
             "instance " + std::to_string(i));
    ++instances;
  }

  const auto f = test::eval_fixture();
  const auto r = compute_metrics(f.pred, f.gold);
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  c.expect(r.per_label.at(Label::Patient).counts == Counts{2, 1, 0} && r.per_label.at(Label::Date).counts == Counts{2, 1, 0} &&
               r.per_label.at(Label::City).counts == Counts{0, 2, 1} &&
               r.per_label.at(Label::Doctor).counts == Counts{0, 0, 1} &&
               r.per_label.at(Label::Phone).counts == Counts{0, 0, 1} && r.per_label.at(Label::Age).counts == Counts{1, 0, 0},
           "per-label counts differ from the hand count");
  c.expect(near(r.per_label.at(Label::Patient).f1, 0.8) && near(r.per_label.at(Label::Age).f1, 1.0),
           "per-label F1 differs");
  c.expect(near(r.micro.precision, 5.0 / 9.0) && near(r.micro.recall, 5.0 / 8.0) && near(r.micro.f1, 10.0 / 17.0),
           "micro averages differ");
  c.expect(near(r.macro_precision, 7.0 / 18.0) && near(r.macro_recall, 0.5) && near(r.macro_f1, 2.6 / 6.0),
           "macro averages differ");
  c.expect(near(r.binary.f1, 12.0 / 17.0), "binary F1 differs");
  char buf[160];
  std::snprintf(buf, sizeof buf, "coverage %.4f; greedy = exhaustive on %zu instances; fixture micro F1 %.4f macro F1 %.4f",
                cov, instances, r.micro.f1, r.macro_f1);
  return buf;
}

// 7 -------------------------------------------------------------------------
std::string criterion7(Check& c) {
  test::TempDir dir("accept7");
  write_corpus(dir.path() / "in", synth::generate_corpus(300, 7));
  std::vector<std::map<std::string, std::string>> outs;
  std::vector<std::string> vaults;
  for (unsigned jobs : {1u, 2u, 8u}) {
    RunConfig rc;
    rc.input = dir.path() / "in";
    rc.output = dir.path() / ("out" + std::to_string(jobs));
    rc.vault = dir.path() / ("vault" + std::to_string(jobs));
    rc.jobs = jobs;
    rc.batch_size = 64;
    c.expect(deidentify_corpus(pipeline(RewriteMode::Obfuscate, 99), rc).ok(), "run failed");
    outs.push_back(read_tree(rc.output));
    vaults.push_back(slurp(*rc.vault));
  }
  c.expect(outs[0] == outs[1] && outs[0] == outs[2], "outputs differ across job counts");
  c.expect(vaults[0] == vaults[1] && vaults[0] == vaults[2], "vaults differ across job counts");
  return "300 documents, jobs 1/2/8: outputs and vault byte-identical";
}

// 8 -------------------------------------------------------------------------
std::string criterion8(Check& c) {
  namespace greg = boost::gregorian;
  const auto& dates = test::english_pack()->dates();
  for (const auto& row : test::kDateGolden) {
    const std::string s(row.surface);
    try {
      const ParsedDate d = parse_date(s, dates);
      c.expect(d.year == row.year && d.month == row.month && d.has_day == (row.day != 0) &&
                   (row.day == 0 || d.day == row.day) && d.format_descriptor == row.descriptor,
               s + " parsed wrongly");
      c.expect(render_date(d, dates) == s, s + " does not round-trip");
      const ParsedDate sh = shift_date(d, row.shift);
      c.expect(render_date(sh, dates) == row.shifted, s + " shifted to " + render_date(sh, dates));
      const greg::date want = greg::date(row.year, row.month, row.day ? row.day : 1) + greg::days(row.shift);
      c.expect(sh.year == want.year() && sh.month == want.month() && (!sh.has_day || sh.day == want.day()),
               s + " disagrees with the calendar oracle");
    } catch (const std::exception& e) {
      c.expect(false, s + ": " + e.what());
    }
  }
  const std::string april = render_date(shift_date(parse_date("April 2020", dates), -14), dates);
  c.expect(april == "March 2020" && april != "3/3/2020", "April 2020 -14 gave " + april);

  // Leap years and month ends against the oracle.
  std::size_t edges = 0;
  for (int y = 1896; y <= 2104; ++y) {
    for (int m = 1; m <= 12; ++m) {
      const greg::date last = greg::date(y, m, 1).end_of_month();
      for (int k : {-1, 1, 2, 29, -29, 365, -366}) {
        const ParsedDate d{y, m, static_cast<int>(last.day()), true, "YYYY-MM-DD", "en"};
        const ParsedDate s = shift_date(d, k);
        const greg::date want = last + greg::days(k);
        c.expect(s.year == want.year() && s.month == want.month() && s.day == want.day(),
                 greg::to_iso_extended_string(last) + " " + std::to_string(k));
        ++edges;
      }
    }
  }
  return std::to_string(test::kDateGolden.size()) + " golden rows; " + std::to_string(edges) +
         " month-end shifts agree with boost::gregorian";
}

// 9 -------------------------------------------------------------------------
std::string criterion9(Check& c) {
  std::string detail;
  double worst_gain = 1.0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto corpus = synth::generate_corpus(300, seed);
    auto score = [&](bool rules) {
      PipelineOptions opt;
      opt.use_rules = rules;
      const Pipeline p(test::english_pack(), opt);
      std::vector<Annotation> pred;
      for (const auto& d : corpus.documents) {
        const auto a = Pipeline::annotations(d.id, p.detect(d).merged);
        pred.insert(pred.end(), a.begin(), a.end());
      }
      return compute_metrics(pred, corpus.gold);
    };
    const auto full = score(true);
    const auto alone = score(false);
    const double gain = full.micro.f1 - alone.micro.f1;
    worst_gain = std::min(worst_gain, gain);
    c.expect(gain >= 0.10, "seed " + std::to_string(seed) + ": gain " + std::to_string(gain));
    c.expect(full.binary.f1 >= full.micro.f1 && alone.binary.f1 >= alone.micro.f1,
             "seed " + std::to_string(seed) + ": binary F1 below labeled micro F1");
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%.3f->%.3f", detail.empty() ? "" : ", ", alone.micro.f1, full.micro.f1);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "; smallest gain %.3f", worst_gain);
  return "recognizers-only -> full micro F1 over 5 synthetic corpora: " + detail + buf;
}

// 10 ------------------------------------------------------------------------
std::string criterion10(Check& c) {
  const auto corpus = synth::generate_corpus(1000, 10, {.target_bytes = 2048});
  const Pipeline p = pipeline(RewriteMode::MaskEntity);
  std::size_t bytes = 0;
  const auto t0 = Clock::now();
  for (const auto& d : corpus.documents) bytes += p.process(d).rewritten.text.size();
  const double s = seconds_since(t0);
  const double rate = static_cast<double>(corpus.documents.size()) / s;
  c.expect(rate >= 100.0, "only " + std::to_string(rate) + " documents/s");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.0f documents/s on one core (%zu notes, mean %.0f bytes)", rate,
                corpus.documents.size(), static_cast<double>(bytes) / static_cast<double>(corpus.documents.size()));
  return buf;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string(Check&)>>> criteria = {
      {"1 mask examples", criterion1},          {"2 obfuscation shape", criterion2},
      {"3 vault round trip", criterion3},       {"4 consistency suite", criterion4},
      {"5 merge oracle", criterion5},           {"6 evaluation", criterion6},
      {"7 determinism", criterion7},            {"8 date engine", criterion8},
      {"9 rules over recognizers", criterion9}, {"10 throughput", criterion10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    std::string detail;
    try {
      detail = run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok() ? "PASS" : "FAIL") << "  criterion " << name << ": " << detail << "\n";
    for (const auto& f : c.failures) std::cout << "      " << f << "\n";
    if (!c.ok()) ++failed;
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
