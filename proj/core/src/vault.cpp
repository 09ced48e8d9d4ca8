#include "deid/vault.hpp"

#include <cinttypes>
#include <filesystem>

#include "json.hpp"

#include "deid/error.hpp"
#include "deid/random.hpp"
#include "deid/text.hpp"
#include "line_format.hpp"

namespace deid {
namespace {

using nlohmann::json;

json span_json(Span s) { return json::array({s.start, s.end}); }

Span span_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("span must be [start, end]");
  return Span{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::string header_line(const std::string& seed_hash) {
  json h = {{"format", "deid-vault"}, {"version", Vault::kFormatVersion}, {"seed_hash", seed_hash}};
  return h.dump() + "\n";
}

}  // namespace

std::string Vault::hash_seed(std::uint64_t seed) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, keyed_hash(seed, "vault-seed", ""));
  return buf;
}

Vault::Vault(std::uint64_t seed) : seed_hash_(hash_seed(seed)) {}

Vault::Vault(Vault&& other) noexcept { *this = std::move(other); }

Vault& Vault::operator=(Vault&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  if (file_) std::fclose(file_);
  path_ = std::move(other.path_);
  file_ = std::exchange(other.file_, nullptr);
  header_pending_ = other.header_pending_;
  seed_hash_ = std::move(other.seed_hash_);
  records_ = std::move(other.records_);
  docs_ = std::move(other.docs_);
  return *this;
}

Vault::~Vault() {
  if (file_) std::fclose(file_);
}

void Vault::load_lines(std::string_view content, const std::string& path) {
  const auto lines = detail::content_lines(content);
  if (lines.empty()) throw ConfigError(path, 0, "vault has no header");
  try {
    const json h = json::parse(lines[0].text);
    if (h.at("format") != "deid-vault") throw ConfigError(path, lines[0].number, "not a vault file");
    if (h.at("version").get<int>() != kFormatVersion) {
      throw ConfigError(path, lines[0].number, "unsupported vault version");
    }
    seed_hash_ = h.at("seed_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(path, lines[0].number, std::string("bad vault header: ") + e.what());
  }
  std::string current;
  std::size_t expected = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    try {
      const json j = json::parse(lines[i].text);
      const std::string type = j.at("type").get<std::string>();
      if (type == "doc") {
        if (expected != 0) throw ConfigError(path, lines[i].number, "previous document is incomplete");
        current = j.at("doc_id").get<std::string>();
        if (docs_.count(current)) throw ConfigError(path, lines[i].number, "duplicate document '" + current + "'");
        docs_[current];
        expected = j.at("records").get<std::size_t>();
      } else if (type == "record") {
        VaultRecord r;
        r.doc_id = j.at("doc_id").get<std::string>();
        if (r.doc_id != current || expected == 0) {
          throw ConfigError(path, lines[i].number, "record outside its document block");
        }
        if (!j.at("patient_id").is_null()) r.patient_id = j.at("patient_id").get<std::string>();
        const auto label = parse_label(j.at("label").get<std::string>());
        if (!label) throw ConfigError(path, lines[i].number, "invalid label");
        r.label = *label;
        r.input_span = span_from(j.at("in"));
        r.output_span = span_from(j.at("out"));
        r.original = j.at("original").get<std::string>();
        r.replacement = j.at("replacement").get<std::string>();
        docs_[current].records.push_back(records_.size());
        records_.push_back(std::move(r));
        --expected;
      } else {
        throw ConfigError(path, lines[i].number, "unknown line type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ConfigError(path, lines[i].number, e.what());
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError(path, lines[i].number, e.what());
    }
  }
  if (expected != 0) throw ConfigError(path, 0, "last document block is truncated");
}

Vault Vault::open(const std::string& path, std::uint64_t seed) {
  Vault v(seed);
  v.path_ = path;
  std::error_code ec;
  const bool existing = std::filesystem::is_regular_file(path, ec) && std::filesystem::file_size(path, ec) > 0;
  if (existing) {
    const std::string wanted = v.seed_hash_;
    v.load_lines(detail::read_file(path), path);
    if (v.seed_hash_ != wanted) throw ConfigError(path, 1, "vault was written with a different seed");
  }
  v.file_ = std::fopen(path.c_str(), "ab");
  if (!v.file_) throw VaultWriteError("cannot open vault '" + path + "' for appending");
  // The header goes out with the first document so that an unwritable
  // target fails on append rather than leaving an empty file behind.
  v.header_pending_ = !existing;
  return v;
}

Vault Vault::read(const std::string& path) {
  Vault v;
  v.path_ = path;
  v.load_lines(detail::read_file(path), path);
  return v;
}

std::size_t Vault::append(const RewriteResult& result, const Document& doc) {
  std::lock_guard lock(mutex_);
  if (!path_.empty() && !file_) throw VaultWriteError("vault '" + path_ + "' is read-only");
  if (docs_.count(doc.id)) throw VaultWriteError("document '" + doc.id + "' is already in the vault");

  std::vector<VaultRecord> fresh;
  fresh.reserve(result.replacements.size());
  for (const auto& rep : result.replacements) {
    if (rep.chunk.text.empty() || rep.replacement.empty()) {
      throw InternalError("empty original or replacement for document '" + doc.id + "'");
    }
    if (!fresh.empty() && rep.chunk.span.start < fresh.back().input_span.end) {
      throw VaultWriteError("duplicate or overlapping input span in document '" + doc.id + "'");
    }
    fresh.push_back({doc.id, doc.patient_id, rep.chunk.span, rep.chunk.label, rep.chunk.text, rep.replacement,
                     rep.output_span});
  }

  if (file_) {
    std::string block;
    if (header_pending_) block += header_line(seed_hash_);
    block += json{{"type", "doc"}, {"doc_id", doc.id}, {"records", fresh.size()}}.dump() + "\n";
    for (const auto& r : fresh) {
      json j = {{"type", "record"},
                {"doc_id", r.doc_id},
                {"patient_id", r.patient_id ? json(*r.patient_id) : json(nullptr)},
                {"label", label_name(r.label)},
                {"in", span_json(r.input_span)},
                {"out", span_json(r.output_span)},
                {"original", r.original},
                {"replacement", r.replacement}};
      block += j.dump() + "\n";
    }
    std::error_code ec;
    const auto before = std::filesystem::is_regular_file(path_, ec) ? std::filesystem::file_size(path_, ec) : 0;
    const bool ok = std::fwrite(block.data(), 1, block.size(), file_) == block.size() && std::fflush(file_) == 0;
    if (!ok) {
      std::clearerr(file_);
      if (std::filesystem::is_regular_file(path_, ec)) std::filesystem::resize_file(path_, before, ec);
      throw VaultWriteError("failed to write vault '" + path_ + "' for document '" + doc.id + "'");
    }
    header_pending_ = false;
  }

  auto& entry = docs_[doc.id];
  for (auto& r : fresh) {
    entry.records.push_back(records_.size());
    records_.push_back(std::move(r));
  }
  return entry.records.size();
}

std::string Vault::reidentify(std::string_view deidentified, const std::string& doc_id) const {
  std::lock_guard lock(mutex_);
  auto it = docs_.find(doc_id);
  if (it == docs_.end()) throw NotFoundError("document '" + doc_id + "' is not in the vault");
  Text text;
  try {
    text = Text(std::string(deidentified));
  } catch (const EncodingError&) {
    throw IntegrityError("de-identified text for '" + doc_id + "' is not valid UTF-8",
                         it->second.records.empty() ? 0 : it->second.records.front());
  }
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t idx : it->second.records) {
    const auto& r = records_[idx];
    if (r.output_span.start < cursor || r.output_span.end > text.size() ||
        text.slice_view(r.output_span) != r.replacement) {
      throw IntegrityError("document '" + doc_id + "' does not match vault record " + std::to_string(idx) +
                               " (" + std::string(label_name(r.label)) + " at " +
                               std::to_string(r.output_span.start) + ")",
                           idx);
    }
    out += text.slice_view(Span{cursor, r.output_span.start});
    out += r.original;
    cursor = r.output_span.end;
  }
  out += text.slice_view(Span{cursor, text.size()});
  return out;
}

bool Vault::has_document(const std::string& doc_id) const {
  std::lock_guard lock(mutex_);
  return docs_.count(doc_id) > 0;
}

std::vector<VaultRecord> Vault::records_for(const std::string& doc_id) const {
  std::lock_guard lock(mutex_);
  std::vector<VaultRecord> out;
  if (auto it = docs_.find(doc_id); it != docs_.end()) {
    for (std::size_t idx : it->second.records) out.push_back(records_[idx]);
  }
  return out;
}

std::vector<std::string> Vault::documents() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, e] : docs_) out.push_back(id);
  return out;
}

std::size_t Vault::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace deid
