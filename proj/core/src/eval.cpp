#include "deid/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <tuple>

#include "deid/error.hpp"
#include "line_format.hpp"

namespace deid {
namespace {

struct Edge {
  std::size_t gold;
  std::size_t pred;
  double cov;
};

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool excluded(const MatchSpec& spec, Label l) {
  return spec.excluded_labels.count(l) || spec.excluded_labels.count(spec.effective(l));
}

std::vector<Annotation> kept(std::span<const Annotation> in, const MatchSpec& spec) {
  std::vector<Annotation> out;
  for (const auto& a : in) {
    if (!excluded(spec, a.label)) out.push_back(a);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void MatchSpec::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("coverage threshold must lie in (0, 1]");
  if (pred_ratio && !(*pred_ratio > 0.0 && *pred_ratio <= 1.0)) {
    throw ConfigError("pred-side ratio must lie in (0, 1]");
  }
}

MatchSpec MatchSpec::parse_mode(std::string_view s) {
  MatchSpec spec;
  if (s == "token") {
    spec.mode = MatchMode::TokenOverlap;
  } else if (s == "coverage") {
    spec.mode = MatchMode::Coverage;
  } else if (s.starts_with("coverage:")) {
    spec.mode = MatchMode::Coverage;
    spec.threshold = detail::parse_double(s.substr(9), "--match", 0);
  } else {
    throw ConfigError("match mode must be coverage:<t> or token, got '" + std::string(s) + "'");
  }
  spec.validate();
  return spec;
}

double coverage(Span pred, Span gold) noexcept {
  if (gold.empty()) return 0.0;
  return static_cast<double>(pred.intersection(gold)) / static_cast<double>(gold.length());
}

bool spans_match(Span pred, Span gold, const MatchSpec& spec) {
  const std::size_t inter = pred.intersection(gold);
  if (inter == 0) return false;
  if (spec.pred_ratio && static_cast<double>(inter) < *spec.pred_ratio * static_cast<double>(pred.length())) {
    return false;
  }
  if (spec.mode == MatchMode::TokenOverlap) return true;
  // Small tolerance so 3/5 still meets a 0.6 threshold.
  return static_cast<double>(inter) >= spec.threshold * static_cast<double>(gold.length()) - 1e-9;
}

MatchResult match_chunks(std::span<const Annotation> pred, std::span<const Annotation> gold, const MatchSpec& spec,
                         bool ignore_labels) {
  MatchResult r;
  r.gold_to_pred.assign(gold.size(), std::nullopt);
  r.pred_to_gold.assign(pred.size(), std::nullopt);

  std::vector<Edge> edges;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (!ignore_labels && spec.effective(gold[g].label) != spec.effective(pred[p].label)) continue;
      if (!spans_match(pred[p].span, gold[g].span, spec)) continue;
      edges.push_back({g, p, coverage(pred[p].span, gold[g].span)});
    }
  }
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    if (a.cov != b.cov) return a.cov > b.cov;
    return std::tie(gold[a.gold].span.start, pred[a.pred].span.start, a.gold, a.pred) <
           std::tie(gold[b.gold].span.start, pred[b.pred].span.start, b.gold, b.pred);
  });
  for (const auto& e : edges) {
    if (r.gold_to_pred[e.gold] || r.pred_to_gold[e.pred]) continue;
    r.gold_to_pred[e.gold] = e.pred;
    r.pred_to_gold[e.pred] = e.gold;
  }

  // Augmenting paths; adjacency keeps the greedy preference order.
  std::vector<std::vector<std::size_t>> adj(gold.size());
  for (const auto& e : edges) adj[e.gold].push_back(e.pred);
  std::vector<char> seen(pred.size());
  std::function<bool(std::size_t)> augment = [&](std::size_t g) {
    for (std::size_t p : adj[g]) {
      if (seen[p]) continue;
      seen[p] = 1;
      if (!r.pred_to_gold[p] || augment(*r.pred_to_gold[p])) {
        r.gold_to_pred[g] = p;
        r.pred_to_gold[p] = g;
        return true;
      }
    }
    return false;
  };
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (r.gold_to_pred[g] || adj[g].empty()) continue;
    std::fill(seen.begin(), seen.end(), 0);
    augment(g);
  }
  r.matched = static_cast<std::size_t>(
      std::count_if(r.gold_to_pred.begin(), r.gold_to_pred.end(), [](const auto& m) { return m.has_value(); }));
  return r;
}

Score Score::from(const Counts& c) {
  Score s;
  s.counts = c;
  s.precision = ratio(c.tp, c.tp + c.fp, s.precision_undefined);
  s.recall = ratio(c.tp, c.tp + c.fn, s.recall_undefined);
  s.f1_undefined = s.precision + s.recall == 0.0;
  s.f1 = s.f1_undefined ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

Evaluator::Evaluator(MatchSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

void Evaluator::add_document(std::span<const Annotation> pred_in, std::span<const Annotation> gold_in) {
  const auto pred = kept(pred_in, spec_);
  const auto gold = kept(gold_in, spec_);
  ++documents_;

  const MatchResult labeled = match_chunks(pred, gold, spec_);
  for (std::size_t g = 0; g < gold.size(); ++g) {
    auto& c = per_label_[spec_.effective(gold[g].label)];
    (labeled.gold_to_pred[g] ? c.tp : c.fn) += 1;
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!labeled.pred_to_gold[p]) per_label_[spec_.effective(pred[p].label)].fp += 1;
  }

  const MatchResult binary = match_chunks(pred, gold, spec_, /*ignore_labels=*/true);
  binary_.tp += binary.matched;
  binary_.fn += gold.size() - binary.matched;
  binary_.fp += pred.size() - binary.matched;
}

MetricsReport Evaluator::report() const {
  MetricsReport rep;
  rep.documents = documents_;
  Counts total;
  std::size_t with_support = 0;
  for (const auto& [label, counts] : per_label_) {
    const Score s = Score::from(counts);
    rep.per_label[label] = s;
    total += counts;
    if (s.support() > 0) {
      ++with_support;
      rep.macro_precision += s.precision;
      rep.macro_recall += s.recall;
      rep.macro_f1 += s.f1;
    }
  }
  if (with_support > 0) {
    rep.macro_precision /= static_cast<double>(with_support);
    rep.macro_recall /= static_cast<double>(with_support);
    rep.macro_f1 /= static_cast<double>(with_support);
  } else {
    rep.macro_undefined = true;
  }
  rep.micro = Score::from(total);
  rep.binary = Score::from(binary_);
  return rep;
}

namespace {

std::map<std::string, std::pair<std::vector<Annotation>, std::vector<Annotation>>> by_doc(
    std::span<const Annotation> pred, std::span<const Annotation> gold) {
  std::map<std::string, std::pair<std::vector<Annotation>, std::vector<Annotation>>> docs;
  for (const auto& a : pred) docs[a.doc_id].first.push_back(a);
  for (const auto& a : gold) docs[a.doc_id].second.push_back(a);
  return docs;
}

}  // namespace

MetricsReport compute_metrics(std::span<const Annotation> pred, std::span<const Annotation> gold,
                              const MatchSpec& spec) {
  Evaluator ev(spec);
  for (const auto& [id, pg] : by_doc(pred, gold)) ev.add_document(pg.first, pg.second);
  return ev.report();
}

Score binary_phi_metrics(std::span<const Annotation> pred, std::span<const Annotation> gold, const MatchSpec& spec) {
  return compute_metrics(pred, gold, spec).binary;
}

std::vector<Annotation> parse_annotations(std::string_view content, const std::string& resource_name,
                                          const MatchSpec& spec, bool gold) {
  std::vector<Annotation> out;
  for (const auto& line : detail::content_lines(content)) {
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.text.find('\t', pos);
      f.push_back(line.text.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (f.size() != 4) throw ConfigError(resource_name, line.number, "expected doc_id<TAB>start<TAB>end<TAB>label");
    Annotation a;
    a.doc_id = std::string(f[0]);
    const long long s = detail::parse_int(f[1], resource_name, line.number);
    const long long e = detail::parse_int(f[2], resource_name, line.number);
    if (s < 0 || e <= s) throw ConfigError(resource_name, line.number, "span must satisfy 0 <= start < end");
    a.span = Span{static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
    const std::string name(detail::trim(f[3]));
    if (auto it = spec.label_mapping.find(name); it != spec.label_mapping.end()) {
      a.label = it->second;
    } else if (auto l = parse_label(name)) {
      a.label = *l;
    } else {
      throw ConfigError(resource_name, line.number, "unknown label '" + name + "'");
    }
    out.push_back(std::move(a));
  }
  if (gold) {
    auto sorted = out;
    std::sort(sorted.begin(), sorted.end(),
              [](const Annotation& x, const Annotation& y) { return std::tie(x.doc_id, x.span) < std::tie(y.doc_id, y.span); });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].doc_id == sorted[i - 1].doc_id && sorted[i].span.overlaps(sorted[i - 1].span)) {
        throw ConfigError(resource_name, 0, "overlapping gold spans in document '" + sorted[i].doc_id + "'");
      }
    }
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::string& path, const MatchSpec& spec, bool gold) {
  return parse_annotations(detail::read_file(path), path, spec, gold);
}

std::string format_annotations(std::span<const Annotation> annotations) {
  std::string out;
  for (const auto& a : annotations) {
    out += a.doc_id + "\t" + std::to_string(a.span.start) + "\t" + std::to_string(a.span.end) + "\t" +
           std::string(label_name(a.label)) + "\n";
  }
  return out;
}

std::string format_report(const MetricsReport& r) {
  std::string out;
  char buf[160];
  auto row = [&](const std::string& name, const Score& s) {
    std::snprintf(buf, sizeof buf, "%-14s %9s %9s %9s %8zu %6zu %6zu %6zu\n", name.c_str(), fmt(s.precision).c_str(),
                  fmt(s.recall).c_str(), fmt(s.f1).c_str(), s.support(), s.counts.tp, s.counts.fp, s.counts.fn);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-14s %9s %9s %9s %8s %6s %6s %6s\n", "label", "precision", "recall", "f1",
                "support", "tp", "fp", "fn");
  out += buf;
  for (const auto& [label, s] : r.per_label) row(std::string(label_name(label)), s);
  row("micro", r.micro);
  std::snprintf(buf, sizeof buf, "%-14s %9s %9s %9s\n", "macro", fmt(r.macro_precision).c_str(),
                fmt(r.macro_recall).c_str(), fmt(r.macro_f1).c_str());
  out += buf;
  row("binary-phi", r.binary);
  out += "\n";

  auto machine = [&](const std::string& scope, const Score& s) {
    out += "metric\t" + scope + "\t" + fmt(s.precision) + "\t" + fmt(s.recall) + "\t" + fmt(s.f1) + "\t" +
           std::to_string(s.support()) + "\t" + std::to_string(s.counts.tp) + "\t" + std::to_string(s.counts.fp) +
           "\t" + std::to_string(s.counts.fn);
    if (s.precision_undefined) out += "\tprecision-undefined";
    if (s.recall_undefined) out += "\trecall-undefined";
    out += "\n";
  };
  for (const auto& [label, s] : r.per_label) machine(std::string(label_name(label)), s);
  machine("micro", r.micro);
  out += "metric\tmacro\t" + fmt(r.macro_precision) + "\t" + fmt(r.macro_recall) + "\t" + fmt(r.macro_f1) +
         (r.macro_undefined ? "\tundefined" : "") + "\n";
  machine("binary-phi", r.binary);
  out += "documents\t" + std::to_string(r.documents) + "\n";
  return out;
}

}  // namespace deid
