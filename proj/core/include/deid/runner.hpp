#pragma once

// Corpus runs: one UTF-8 document per file, outputs mirroring the input tree.
//
// Documents of one patient are processed in document-id order by a single
// worker, so surrogates do not depend on the number of workers. Results are
// committed (vault, then output file) in document-id order.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deid/model.hpp"
#include "deid/pipeline.hpp"

namespace deid {

struct InputDocument {
  std::string id;  // path relative to the input root, '/' separated
  std::filesystem::path path;
  std::optional<std::string> patient_id;
};

/// Regular files under `root`, sorted by id. `<file>.meta` sidecars are not
/// documents; a sidecar line `patient_id=<id>` sets the patient. Otherwise
/// `patient_id_regex` (first capture group, or the whole match) is tried on
/// the document id.
std::vector<InputDocument> discover_inputs(const std::filesystem::path& root,
                                           const std::optional<std::string>& patient_id_regex = std::nullopt);

struct DocumentOutcome {
  std::optional<Pipeline::Result> result;
  std::string error;  // set when result is empty
};

/// Runs the pipeline over documents with `jobs` workers. Patient contexts
/// persist across calls.
class CorpusProcessor {
 public:
  CorpusProcessor(const Pipeline& pipeline, unsigned jobs);

  std::vector<DocumentOutcome> process(std::span<const Document> docs);

  const std::map<std::string, PatientContext>& contexts() const noexcept { return contexts_; }

 private:
  const Pipeline& pipeline_;
  unsigned jobs_;
  std::map<std::string, PatientContext> contexts_;
};

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::filesystem::path> vault;
  /// Allows the vault inside the output directory.
  bool force = false;
  unsigned jobs = 1;
  std::optional<std::string> patient_id_regex;
  /// TSV of detected chunks (doc_id, start, end, label).
  std::optional<std::filesystem::path> spans_out;
  std::size_t batch_size = 256;
};

struct DocumentFailure {
  std::string doc_id;
  std::string message;
};

struct RunSummary {
  std::size_t documents = 0;  // succeeded
  std::size_t failed = 0;
  std::size_t records = 0;    // vault records written
  std::map<Label, std::size_t> chunks_by_label;
  double seconds = 0;
  std::vector<DocumentFailure> failures;

  bool ok() const noexcept { return failed == 0; }
};

/// Throws ConfigError for an unusable configuration (missing input, vault
/// next to the outputs without `force`). Per-document problems land in the
/// summary; their outputs are not written.
RunSummary deidentify_corpus(const Pipeline& pipeline, const RunConfig& config);

/// `config.input` holds de-identified files, `config.vault` is required.
RunSummary reidentify_corpus(const RunConfig& config);

/// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace deid
