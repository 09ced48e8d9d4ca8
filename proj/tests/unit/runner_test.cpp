#include <gtest/gtest.h>

#include <fstream>

#include "deid/error.hpp"
#include "deid/runner.hpp"
#include "deid/synth.hpp"
#include "test_support.hpp"

namespace deid {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void write(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

void write_corpus(const fs::path& dir, const synth::Corpus& c) {
  for (const auto& d : c.documents) {
    write(dir / d.id, d.text);
    write(dir / (d.id + ".meta"), "patient_id=" + *d.patient_id + "\n");
  }
}

Pipeline obfuscating(std::uint64_t seed = 11) {
  PipelineOptions opt;
  opt.rewrite.mode = RewriteMode::Obfuscate;
  opt.seed = seed;
  return Pipeline(test::english_pack(), opt);
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(dir).generic_string()] = slurp(e.path());
  }
  return out;
}

TEST(Runner, DiscoverySkipsSidecarsAndReadsPatientIds) {
  test::TempDir dir;
  write(dir.path() / "b.txt", "x");
  write(dir.path() / "b.txt.meta", "# sidecar\npatient_id = P7\n");
  write(dir.path() / "sub/P42_a.txt", "y");
  write(dir.path() / "c.txt.deid-tmp", "partial");
  const auto in = discover_inputs(dir.path(), std::string("(P\\d+)_"));
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0].id, "b.txt");
  EXPECT_EQ(in[0].patient_id, "P7");
  EXPECT_EQ(in[1].id, "sub/P42_a.txt");
  EXPECT_EQ(in[1].patient_id, "P42");
  EXPECT_THROW(discover_inputs(dir.path() / "nope"), ConfigError);
  EXPECT_THROW(discover_inputs(dir.path(), std::string("(")), ConfigError);
}

TEST(Runner, ParallelRunsAreByteIdentical) {
  test::TempDir dir;
  write_corpus(dir.path() / "in", synth::generate_corpus(120, 5));
  std::vector<std::map<std::string, std::string>> outputs;
  std::vector<std::string> vaults;
  for (unsigned jobs : {1u, 2u, 8u}) {
    RunConfig rc;
    rc.input = dir.path() / "in";
    rc.output = dir.path() / ("out" + std::to_string(jobs));
    rc.vault = dir.path() / ("vault" + std::to_string(jobs));
    rc.jobs = jobs;
    rc.batch_size = 32;
    const auto s = deidentify_corpus(obfuscating(), rc);
    EXPECT_TRUE(s.ok());
    EXPECT_EQ(s.documents, 120u);
    outputs.push_back(read_tree(rc.output));
    vaults.push_back(slurp(*rc.vault));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);
  EXPECT_EQ(vaults[0], vaults[1]);
  EXPECT_EQ(vaults[0], vaults[2]);
}

TEST(Runner, RoundTripThroughFiles) {
  test::TempDir dir;
  const auto corpus = synth::generate_corpus(50, 6);
  write_corpus(dir.path() / "in", corpus);
  RunConfig de;
  de.input = dir.path() / "in";
  de.output = dir.path() / "out";
  de.vault = dir.path() / "v.ndjson";
  de.jobs = 4;
  de.spans_out = dir.path() / "spans.tsv";
  const auto s = deidentify_corpus(obfuscating(), de);
  ASSERT_TRUE(s.ok());
  EXPECT_GT(s.records, 0u);
  EXPECT_FALSE(load_annotations(de.spans_out->string()).empty());

  RunConfig re;
  re.input = de.output;
  re.output = dir.path() / "restored";
  re.vault = de.vault;
  const auto r = reidentify_corpus(re);
  ASSERT_TRUE(r.ok());
  for (const auto& d : corpus.documents) EXPECT_EQ(slurp(re.output / d.id), d.text) << d.id;
}

TEST(Runner, SamePatientAcrossDocumentsIsConsistent) {
  test::TempDir dir;
  write(dir.path() / "in/a.txt", "Name: Jane Doe\nSeen today.");
  write(dir.path() / "in/a.txt.meta", "patient_id=P1\n");
  write(dir.path() / "in/b.txt", "Jane reports feeling better.");
  write(dir.path() / "in/b.txt.meta", "patient_id=P1\n");
  RunConfig rc;
  rc.input = dir.path() / "in";
  rc.output = dir.path() / "out";
  rc.jobs = 2;
  ASSERT_TRUE(deidentify_corpus(obfuscating(), rc).ok());
  const std::string a = slurp(rc.output / "a.txt");
  const std::string b = slurp(rc.output / "b.txt");
  const std::string first = a.substr(6, a.find(' ', 6) - 6);
  EXPECT_TRUE(b.starts_with(first + " ")) << a << " | " << b;
}

TEST(Runner, RefusesVaultInsideOutput) {
  test::TempDir dir;
  write(dir.path() / "in/a.txt", "Jane is here.");
  RunConfig rc;
  rc.input = dir.path() / "in";
  rc.output = dir.path() / "out";
  rc.vault = dir.path() / "out/vault";
  const Pipeline p(test::english_pack());
  EXPECT_THROW(deidentify_corpus(p, rc), ConfigError);
  EXPECT_FALSE(fs::exists(*rc.vault));
  rc.force = true;
  EXPECT_TRUE(deidentify_corpus(p, rc).ok());
}

TEST(Runner, EmptyInput) {
  test::TempDir dir;
  fs::create_directories(dir.path() / "in");
  RunConfig rc;
  rc.input = dir.path() / "in";
  rc.output = dir.path() / "out";
  const auto s = deidentify_corpus(Pipeline(test::english_pack()), rc);
  EXPECT_TRUE(s.ok());
  EXPECT_EQ(s.documents, 0u);
  EXPECT_TRUE(fs::is_directory(rc.output));
}

TEST(Runner, BadDocumentDoesNotStopTheRun) {
  test::TempDir dir;
  write(dir.path() / "in/good.txt", "Jane is a nurse.");
  write(dir.path() / "in/bad.txt", std::string("Jane \xFF\xFE broken", 15));
  RunConfig rc;
  rc.input = dir.path() / "in";
  rc.output = dir.path() / "out";
  const auto s = deidentify_corpus(Pipeline(test::english_pack()), rc);
  EXPECT_EQ(s.documents, 1u);
  EXPECT_EQ(s.failed, 1u);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].doc_id, "bad.txt");
  EXPECT_FALSE(fs::exists(rc.output / "bad.txt"));
  EXPECT_EQ(slurp(rc.output / "good.txt"), "PATIENT is a PROFESSION.");
}

TEST(Runner, ReidentifyNeedsVault) {
  RunConfig rc;
  rc.input = ".";
  rc.output = ".";
  EXPECT_THROW(reidentify_corpus(rc), ConfigError);
}

TEST(Runner, ProcessorKeepsContextsAcrossCalls) {
  const auto p = obfuscating();
  CorpusProcessor proc(p, 4);
  const std::vector<Document> first = {{"a", "P1", "Name: Jane Doe\n", "en"}};
  const std::vector<Document> second = {{"b", "P1", "Jane called.", "en"}};
  const auto r1 = proc.process(first);
  const auto r2 = proc.process(second);
  ASSERT_TRUE(r1[0].result && r2[0].result);
  EXPECT_EQ(proc.contexts().size(), 1u);
  const std::string a = r1[0].result->rewritten.text;
  EXPECT_TRUE(r2[0].result->rewritten.text.starts_with(a.substr(6, a.find(' ', 6) - 6) + " "));
}

}  // namespace
}  // namespace deid
