#include "deid/pipeline.hpp"

#include "deid/error.hpp"
#include "deid/rules.hpp"

namespace deid {

std::string patient_key(const Document& doc) {
  return doc.patient_id ? "patient:" + *doc.patient_id : "doc:" + doc.id;
}

Pipeline::Pipeline(std::shared_ptr<const LanguagePack> pack, PipelineOptions options)
    : pack_(std::move(pack)),
      options_(std::move(options)),
      detector_(pack_->sentence_config()),
      recognizers_(pack_->make_recognizers()),
      policy_(options_.merge_policy ? *options_.merge_policy : pack_->policy()),
      dates_(pack_->dates()),
      faker_(pack_->faker()) {
  options_.rewrite.validate();
  options_.day_shift.validate();
  if (options_.rewrite.mode == RewriteMode::Obfuscate && !options_.seed) {
    throw ConfigError("obfuscation needs an explicit seed");
  }
  options_.rewrite.taxonomy = pack_->taxonomy();
  policy_.validate(pack_->source_classes());
  if (options_.canonical_date_format) dates_.set_canonical(*options_.canonical_date_format);
  if (!options_.dictionary.empty()) faker_.set_dictionary(options_.dictionary);
}

Pipeline::Detection Pipeline::detect(const Document& doc) const {
  Detection d;
  const Text text(doc.text);
  d.analysis = analyze(text, detector_);
  if (options_.use_recognizers) {
    for (const auto& r : recognizers_) {
      d.recognized.push_back(r->recognize(doc, text, d.analysis.tokens));
    }
  }
  if (options_.use_rules) d.rule_chunks = apply_rules(text, pack_->rules());
  d.merged = merge(d.recognized, d.rule_chunks, policy_);
  return d;
}

Pipeline::Result Pipeline::process(const Document& doc, PatientContext& ctx) const {
  Result r;
  r.detection = detect(doc);
  r.rewritten = rewrite(doc, r.detection.merged, options_.rewrite, ctx, faker_, dates_);
  return r;
}

Pipeline::Result Pipeline::process(const Document& doc) const {
  PatientContext ctx = context_for(patient_key(doc));
  return process(doc, ctx);
}

PatientContext Pipeline::context_for(const std::string& patient_key) const {
  DayShiftPolicy shift = options_.day_shift;
  if (options_.seed) shift.seed = *options_.seed;
  std::string_view id = patient_key;
  if (id.starts_with("patient:")) id.remove_prefix(8);
  return PatientContext::make(options_.seed.value_or(0), patient_key, shift_for_patient(id, shift),
                              options_.age_groups);
}

std::vector<Annotation> Pipeline::annotations(const std::string& doc_id, const MergedChunks& merged) {
  std::vector<Annotation> out;
  out.reserve(merged.chunks.size());
  for (const auto& c : merged.chunks) out.push_back({doc_id, c.span, c.label});
  return out;
}

}  // namespace deid
