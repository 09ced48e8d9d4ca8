#pragma once

// Re-identification vault: an append-only record of every replacement, from
// which the original text can be restored exactly.
//
// On disk: newline-delimited JSON. The first line is a header
//   {"format":"deid-vault","version":1,"seed_hash":"<hex>"}
// then, per document, a `doc` line followed by one `record` line per
// replacement. A document's lines are written with a single flushed write.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deid/model.hpp"
#include "deid/rewrite.hpp"

namespace deid {

struct VaultRecord {
  std::string doc_id;
  std::optional<std::string> patient_id;
  Span input_span;
  Label label = Label::Name;
  std::string original;
  std::string replacement;
  Span output_span;

  bool operator==(const VaultRecord&) const = default;
};

class Vault {
 public:
  static constexpr int kFormatVersion = 1;

  /// In-memory vault (nothing is persisted).
  explicit Vault(std::uint64_t seed = 0);

  /// Opens `path` for appending, creating it with a header when absent.
  /// Existing records are loaded so uniqueness holds across runs. Throws
  /// ConfigError on a malformed file or a seed mismatch.
  static Vault open(const std::string& path, std::uint64_t seed = 0);

  /// Read-only load of a completed vault.
  static Vault read(const std::string& path);

  Vault(Vault&& other) noexcept;
  Vault& operator=(Vault&& other) noexcept;
  Vault(const Vault&) = delete;
  Vault& operator=(const Vault&) = delete;
  ~Vault();

  /// Writes the document marker and one record per replacement, atomically.
  /// Returns the number of records. Throws VaultWriteError on a duplicate
  /// document or a storage failure; nothing of the document is kept then.
  std::size_t append(const RewriteResult& result, const Document& doc);

  /// Restores the original text. Throws NotFoundError for an unknown
  /// document and IntegrityError at the first record whose replacement is
  /// not found at its output span.
  std::string reidentify(std::string_view deidentified, const std::string& doc_id) const;

  bool has_document(const std::string& doc_id) const;
  std::vector<VaultRecord> records_for(const std::string& doc_id) const;
  std::vector<std::string> documents() const;
  std::size_t size() const;
  const std::string& seed_hash() const noexcept { return seed_hash_; }

  static std::string hash_seed(std::uint64_t seed);

 private:
  struct DocEntry {
    std::vector<std::size_t> records;  // indices into records_
  };

  void load_lines(std::string_view content, const std::string& path);

  mutable std::mutex mutex_;
  std::string path_;
  std::FILE* file_ = nullptr;
  bool header_pending_ = false;
  std::string seed_hash_;
  std::vector<VaultRecord> records_;
  std::map<std::string, DocEntry> docs_;
};

}  // namespace deid
