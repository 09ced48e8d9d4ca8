#include "deid/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include <boost/regex.hpp>

#include "deid/error.hpp"
#include "deid/eval.hpp"
#include "deid/vault.hpp"
#include "line_format.hpp"

namespace deid {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kMetaSuffix = ".meta";
constexpr std::string_view kTempSuffix = ".deid-tmp";

std::optional<std::string> read_sidecar(const fs::path& meta) {
  std::error_code ec;
  if (!fs::is_regular_file(meta, ec)) return std::nullopt;
  const std::string content = detail::read_file(meta.string());
  for (const auto& line : detail::content_lines(content)) {
    const std::size_t eq = line.text.find('=');
    if (eq == std::string_view::npos) continue;
    if (detail::trim(line.text.substr(0, eq)) == "patient_id") {
      std::string value(detail::trim(line.text.substr(eq + 1)));
      if (!value.empty()) return value;
    }
  }
  return std::nullopt;
}

bool inside(const fs::path& dir, const fs::path& path) {
  const fs::path d = fs::weakly_canonical(dir);
  const fs::path p = fs::weakly_canonical(path);
  auto di = d.begin();
  auto pi = p.begin();
  for (; di != d.end(); ++di, ++pi) {
    if (di->empty()) continue;  // trailing separator
    if (pi == p.end() || *di != *pi) return false;
  }
  return true;
}

Document load_document(const InputDocument& in) {
  Document doc;
  doc.id = in.id;
  doc.patient_id = in.patient_id;
  doc.text = detail::read_file(in.path.string());
  return doc;
}

}  // namespace

std::vector<InputDocument> discover_inputs(const fs::path& root, const std::optional<std::string>& patient_id_regex) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw ConfigError("input is not a directory: " + root.string());
  std::optional<boost::regex> re;
  if (patient_id_regex) {
    try {
      re.emplace(*patient_id_regex);
    } catch (const boost::regex_error& e) {
      throw ConfigError("invalid --patient-id-from regex: " + std::string(e.what()));
    }
  }
  std::vector<InputDocument> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.ends_with(kMetaSuffix) || name.ends_with(kTempSuffix)) continue;
    InputDocument d;
    d.path = entry.path();
    d.id = entry.path().lexically_relative(root).generic_string();
    d.patient_id = read_sidecar(fs::path(entry.path().string() + std::string(kMetaSuffix)));
    if (!d.patient_id && re) {
      boost::smatch m;
      if (boost::regex_search(d.id, m, *re)) d.patient_id = m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
    }
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

CorpusProcessor::CorpusProcessor(const Pipeline& pipeline, unsigned jobs)
    : pipeline_(pipeline), jobs_(std::max(1u, jobs)) {}

std::vector<DocumentOutcome> CorpusProcessor::process(std::span<const Document> docs) {
  std::vector<DocumentOutcome> out(docs.size());
  std::vector<std::pair<PatientContext*, std::vector<std::size_t>>> groups;
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::string key = patient_key(docs[i]);
    auto [it, fresh] = group_of.emplace(key, groups.size());
    if (fresh) {
      auto ctx = contexts_.find(key);
      if (ctx == contexts_.end()) ctx = contexts_.emplace(key, pipeline_.context_for(key)).first;
      groups.push_back({&ctx->second, {}});
    }
    groups[it->second].second.push_back(i);
  }

  auto run_group = [&](std::size_t g) {
    auto& [ctx, members] = groups[g];
    for (std::size_t i : members) {
      try {
        out[i].result = pipeline_.process(docs[i], *ctx);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(jobs_, groups.size());
  if (workers <= 1) {
    for (std::size_t g = 0; g < groups.size(); ++g) run_group(g);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t g = next++; g < groups.size(); g = next++) run_group(g);
    });
  }
  pool.clear();
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + std::string(kTempSuffix);
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot write " + path.string());
  }
}

RunSummary deidentify_corpus(const Pipeline& pipeline, const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto inputs = discover_inputs(config.input, config.patient_id_regex);
  if (config.vault && !config.force && inside(config.output, config.vault->parent_path().empty()
                                                                 ? fs::current_path()
                                                                 : config.vault->parent_path())) {
    throw ConfigError("refusing to write the vault into the output directory (use --force)");
  }
  fs::create_directories(config.output);
  std::optional<Vault> vault;
  if (config.vault) vault.emplace(Vault::open(config.vault->string(), pipeline.options().seed.value_or(0)));

  RunSummary summary;
  std::vector<Annotation> spans;
  CorpusProcessor processor(pipeline, config.jobs);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t begin = 0; begin < inputs.size(); begin += batch) {
    const std::size_t end = std::min(inputs.size(), begin + batch);
    std::vector<Document> docs;
    std::vector<std::string> load_errors(end - begin);
    docs.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      try {
        docs.push_back(load_document(inputs[i]));
      } catch (const std::exception& e) {
        load_errors[i - begin] = e.what();
        docs.push_back(Document{inputs[i].id, inputs[i].patient_id, "", "en"});
      }
    }
    auto outcomes = processor.process(docs);
    for (std::size_t k = 0; k < docs.size(); ++k) {
      const Document& doc = docs[k];
      auto fail = [&](std::string msg) {
        ++summary.failed;
        summary.failures.push_back({doc.id, std::move(msg)});
      };
      if (!load_errors[k].empty()) {
        fail(load_errors[k]);
        continue;
      }
      if (!outcomes[k].result) {
        fail(outcomes[k].error);
        continue;
      }
      const auto& result = *outcomes[k].result;
      std::size_t records = 0;
      try {
        if (vault) records = vault->append(result.rewritten, doc);
        write_file_atomic(config.output / fs::path(doc.id), result.rewritten.text);
      } catch (const std::exception& e) {
        fail(e.what());
        continue;
      }
      ++summary.documents;
      summary.records += records;
      for (const auto& c : result.detection.merged.chunks) ++summary.chunks_by_label[c.label];
      if (config.spans_out) {
        auto a = Pipeline::annotations(doc.id, result.detection.merged);
        spans.insert(spans.end(), a.begin(), a.end());
      }
    }
  }
  if (config.spans_out) write_file_atomic(*config.spans_out, format_annotations(spans));
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

RunSummary reidentify_corpus(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!config.vault) throw ConfigError("re-identification needs a vault");
  const Vault vault = Vault::read(config.vault->string());
  const auto inputs = discover_inputs(config.input);
  fs::create_directories(config.output);
  RunSummary summary;
  for (const auto& in : inputs) {
    try {
      const std::string text = detail::read_file(in.path.string());
      const std::string restored = vault.reidentify(text, in.id);
      write_file_atomic(config.output / fs::path(in.id), restored);
      ++summary.documents;
      for (const auto& r : vault.records_for(in.id)) ++summary.chunks_by_label[r.label];
    } catch (const std::exception& e) {
      ++summary.failed;
      summary.failures.push_back({in.id, e.what()});
    }
  }
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

}  // namespace deid
