#pragma once

// Synthetic annotated clinical notes for tests and benchmarks. Every planted
// PHI value is recorded as a gold annotation; notes of one patient repeat the
// same identity (name, gender, age, city).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "deid/eval.hpp"
#include "deid/model.hpp"

namespace deid::synth {

struct Options {
  /// Notes are padded with filler sentences up to about this many bytes.
  std::size_t target_bytes = 0;
  /// Share of names drawn from outside the shipped gazetteers.
  double oov_rate = 0.25;
  /// Documents per patient on average; 0 gives one patient per document.
  std::size_t docs_per_patient = 3;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<Annotation> gold;
};

/// Pure function of its arguments. Document ids are `note_NNNNN.txt`.
Corpus generate_corpus(std::size_t documents, std::uint64_t seed, const Options& options = {});

}  // namespace deid::synth
