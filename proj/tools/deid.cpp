// deid: de-identify, re-identify and evaluate plain-text clinical corpora.
//
// Exit codes: 0 success, 1 at least one document failed, 2 invalid
// configuration or unreadable resources.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deid/error.hpp"
#include "deid/eval.hpp"
#include "deid/langpack.hpp"
#include "deid/pipeline.hpp"
#include "deid/runner.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw deid::ConfigError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::set<deid::Label> parse_labels(const std::string& list, const char* flag) {
  std::set<deid::Label> out;
  for (const auto& name : split_list(list)) {
    const auto l = deid::parse_label(name);
    if (!l) throw deid::ConfigError(std::string(flag) + ": unknown label '" + name + "'");
    out.insert(*l);
  }
  return out;
}

deid::DayShiftPolicy parse_shift(const std::string& spec) {
  deid::DayShiftPolicy p;
  if (spec.starts_with("fixed:")) {
    const std::string path = spec.substr(6);
    p.mode = deid::DayShiftPolicy::Mode::FixedPerPatient;
    p.per_patient = deid::DayShiftPolicy::parse_fixed(slurp(path), path);
  } else if (spec.starts_with("range:")) {
    const auto parts = split_list(spec.substr(6));
    if (parts.size() != 2) throw deid::ConfigError("--shift range:<lo>,<hi> expects two integers");
    try {
      p.lo = std::stoi(parts[0]);
      p.hi = std::stoi(parts[1]);
    } catch (const std::exception&) {
      throw deid::ConfigError("--shift range:<lo>,<hi> expects two integers");
    }
  } else {
    throw deid::ConfigError("--shift must be fixed:<file> or range:<lo>,<hi>");
  }
  p.validate();
  return p;
}

struct PackArgs {
  std::string packs = deid::default_packs_dir().string();
  std::string lang = "en";

  void add(CLI::App* app) {
    app->add_option("--packs", packs, "Directory holding language packs")->capture_default_str();
    app->add_option("--lang", lang, "Language pack to use")->capture_default_str();
  }

  std::shared_ptr<const deid::LanguagePack> load() const {
    return std::make_shared<const deid::LanguagePack>(deid::LanguagePack::load(fs::path(packs) / lang));
  }
};

struct DeidArgs {
  PackArgs pack;
  std::string input, output, text;
  std::string mode = "mask-entity";
  std::size_t mask_width = 3;
  std::string whitelist;
  std::optional<std::uint64_t> seed;
  std::string shift;
  std::string vault;
  bool force = false;
  std::string policy;
  unsigned jobs = 1;
  std::string length = "free";
  std::string fallback = "mask";
  std::string patient_id_from;
  std::string dictionary;
  std::string spans_out;
  std::string age_groups;
  std::string date_format;
  bool no_rules = false;
  bool no_recognizers = false;
};

void print_summary(const deid::RunSummary& s, std::ostream& out) {
  out << "documents\t" << s.documents << "\n";
  out << "failed\t" << s.failed << "\n";
  out << "records\t" << s.records << "\n";
  for (const auto& [label, n] : s.chunks_by_label) out << "chunks\t" << deid::label_name(label) << "\t" << n << "\n";
  out << "seconds\t" << s.seconds << "\n";
}

void report_failures(const deid::RunSummary& s) {
  for (const auto& f : s.failures) std::cerr << "error: " << f.doc_id << ": " << f.message << "\n";
}

int run_deidentify(const DeidArgs& a) {
  deid::PipelineOptions opt;
  const auto mode = deid::parse_rewrite_mode(a.mode);
  if (!mode) throw deid::ConfigError("--mode: unknown mode '" + a.mode + "'");
  opt.rewrite.mode = *mode;
  opt.rewrite.fixed_mask_width = a.mask_width;
  opt.rewrite.whitelist = parse_labels(a.whitelist, "--whitelist");
  if (a.length == "same" || a.length == "same-length") opt.rewrite.length_mode = deid::LengthMode::SameLength;
  else if (a.length != "free") throw deid::ConfigError("--length must be free or same-length");
  if (a.fallback == "random") opt.rewrite.fallback = deid::Fallback::Random;
  else if (a.fallback != "mask") throw deid::ConfigError("--fallback must be mask or random");
  opt.seed = a.seed;
  if (!a.shift.empty()) opt.day_shift = parse_shift(a.shift);
  if (!a.policy.empty()) opt.merge_policy = deid::MergePolicy::load(a.policy);
  if (!a.dictionary.empty()) opt.dictionary = deid::UserDictionary::load(a.dictionary);
  if (!a.age_groups.empty()) opt.age_groups = deid::AgeGroupTable::parse(a.age_groups);
  if (!a.date_format.empty()) opt.canonical_date_format = a.date_format;
  opt.use_rules = !a.no_rules;
  opt.use_recognizers = !a.no_recognizers;

  const deid::Pipeline pipeline(a.pack.load(), std::move(opt));

  if (!a.text.empty()) {
    deid::Document doc{"text", std::nullopt, a.text, pipeline.pack().language()};
    std::cout << pipeline.process(doc).rewritten.text << "\n";
    return 0;
  }
  if (a.input.empty() || a.output.empty()) throw deid::ConfigError("--input and --output are required (or --text)");

  deid::RunConfig rc;
  rc.input = a.input;
  rc.output = a.output;
  if (!a.vault.empty()) rc.vault = a.vault;
  rc.force = a.force;
  rc.jobs = a.jobs;
  if (!a.patient_id_from.empty()) rc.patient_id_regex = a.patient_id_from;
  if (!a.spans_out.empty()) rc.spans_out = a.spans_out;
  const auto summary = deid::deidentify_corpus(pipeline, rc);
  report_failures(summary);
  print_summary(summary, std::cout);
  return summary.ok() ? 0 : kExitFailed;
}

int run_reidentify(const std::string& input, const std::string& output, const std::string& vault) {
  deid::RunConfig rc;
  rc.input = input;
  rc.output = output;
  rc.vault = vault;
  const auto summary = deid::reidentify_corpus(rc);
  report_failures(summary);
  print_summary(summary, std::cout);
  return summary.ok() ? 0 : kExitFailed;
}

struct EvalArgs {
  PackArgs pack;
  std::string gold, pred, out;
  std::string match = "coverage:0.6";
  std::string exclude;
  bool coarse = false;
};

int run_evaluate(const EvalArgs& a) {
  deid::MatchSpec spec = deid::MatchSpec::parse_mode(a.match);
  spec.excluded_labels = parse_labels(a.exclude, "--exclude");
  spec.coarse = a.coarse;
  if (a.coarse) spec.taxonomy = a.pack.load()->taxonomy();
  spec.validate();
  const auto gold = deid::load_annotations(a.gold, spec, true);
  const auto pred = deid::load_annotations(a.pred, spec, false);
  const auto report = deid::compute_metrics(pred, gold, spec);
  const std::string text = deid::format_report(report);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    deid::write_file_atomic(a.out, text);
  }
  return 0;
}

int run_validate(const std::string& dir) {
  const auto pack = deid::LanguagePack::load(dir);
  std::cout << "ok\t" << pack.language() << "\t" << pack.version() << "\t" << pack.content_hash() << "\n";
  std::cout << "resources\t" << pack.resources().size() << "\n";
  std::cout << "rules\t" << pack.rules().size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical text de-identification"};
  app.require_subcommand(1);

  DeidArgs d;
  auto* deid_cmd = app.add_subcommand("deidentify", "Mask or obfuscate PHI in a corpus");
  d.pack.add(deid_cmd);
  deid_cmd->add_option("--input", d.input, "Input directory (one document per file)");
  deid_cmd->add_option("--output", d.output, "Output directory");
  deid_cmd->add_option("--text", d.text, "De-identify this string and print the result");
  deid_cmd->add_option("--mode", d.mode, "mask-entity | mask-fixed | mask-length | obfuscate")->capture_default_str();
  deid_cmd->add_option("--mask-width", d.mask_width, "Asterisks used by mask-fixed")->capture_default_str();
  deid_cmd->add_option("--whitelist", d.whitelist, "Comma-separated labels left untouched");
  deid_cmd->add_option("--seed", d.seed, "Global seed (required for obfuscate)");
  deid_cmd->add_option("--shift", d.shift, "fixed:<file> | range:<lo>,<hi>");
  deid_cmd->add_option("--vault", d.vault, "Re-identification vault file");
  deid_cmd->add_flag("--force", d.force, "Allow the vault inside the output directory");
  deid_cmd->add_option("--policy", d.policy, "Merge policy file replacing the pack's");
  deid_cmd->add_option("--jobs", d.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  deid_cmd->add_option("--length", d.length, "free | same-length")->capture_default_str();
  deid_cmd->add_option("--fallback", d.fallback, "mask | random, for values that cannot be normalized")
      ->capture_default_str();
  deid_cmd->add_option("--patient-id-from", d.patient_id_from, "Regex on the document id; group 1 is the patient");
  deid_cmd->add_option("--dictionary", d.dictionary, "User replacement dictionary (original<TAB>replacement)");
  deid_cmd->add_option("--spans-out", d.spans_out, "Write detected chunks as TSV");
  deid_cmd->add_option("--age-groups", d.age_groups, "Lower bounds of age groups, e.g. 0,5,13,20,40,60,80");
  deid_cmd->add_option("--date-format", d.date_format, "Canonical date format, e.g. {MM}/{D}/{YYYY}");
  deid_cmd->add_flag("--no-rules", d.no_rules, "Skip contextual rules");
  deid_cmd->add_flag("--no-recognizers", d.no_recognizers, "Skip recognizers");

  std::string re_input, re_output, re_vault;
  auto* re_cmd = app.add_subcommand("reidentify", "Restore original text from a vault");
  re_cmd->add_option("--input", re_input, "De-identified directory")->required();
  re_cmd->add_option("--output", re_output, "Output directory")->required();
  re_cmd->add_option("--vault", re_vault, "Vault written by deidentify")->required();

  EvalArgs e;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted spans against gold annotations");
  e.pack.add(eval_cmd);
  eval_cmd->add_option("--gold", e.gold, "Gold TSV (doc_id, start, end, label)")->required();
  eval_cmd->add_option("--pred", e.pred, "Predicted TSV, e.g. from --spans-out")->required();
  eval_cmd->add_option("--match", e.match, "coverage:<t> | token")->capture_default_str();
  eval_cmd->add_option("--exclude", e.exclude, "Comma-separated labels to ignore");
  eval_cmd->add_flag("--coarse", e.coarse, "Score on the coarse label schema");
  eval_cmd->add_option("--out", e.out, "Write the report here instead of stdout");

  std::string pack_dir;
  auto* val_cmd = app.add_subcommand("validate-pack", "Load a language pack and report every problem");
  val_cmd->add_option("dir", pack_dir, "Pack directory")->required();

  std::string list_dir = deid::default_packs_dir().string();
  auto* list_cmd = app.add_subcommand("list-packs", "List installed language packs");
  list_cmd->add_option("--packs", list_dir, "Directory holding language packs")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*deid_cmd) return run_deidentify(d);
    if (*re_cmd) return run_reidentify(re_input, re_output, re_vault);
    if (*eval_cmd) return run_evaluate(e);
    if (*val_cmd) return run_validate(pack_dir);
    if (*list_cmd) {
      for (const auto& name : deid::list_supported(list_dir)) std::cout << name << "\n";
      return 0;
    }
  } catch (const deid::PackError& err) {
    std::cerr << "invalid language pack:\n";
    for (const auto& p : err.problems()) std::cerr << "  " << p << "\n";
    return kExitConfig;
  } catch (const deid::ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
