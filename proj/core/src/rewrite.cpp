#include "deid/rewrite.hpp"

#include "deid/error.hpp"
#include "deid/text.hpp"

namespace deid {
namespace {

// Digits become '9', letters 'a'; everything else is kept.
std::u32string skeleton(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) {
    if (is_digit(c)) c = U'9';
    else if (is_letter(c)) c = U'a';
  }
  return out;
}

std::string fallback_for(const EntityChunk& chunk, const RewritePolicy& policy, const PatientContext& ctx) {
  if (policy.fallback == Fallback::Random) {
    return shape_surrogate(chunk.text, ctx.key("fallback:" + std::string(label_name(chunk.label)), chunk.text));
  }
  if (policy.length_mode == LengthMode::SameLength) return std::string(char_length(chunk.text), '*');
  return mask_name(chunk.label);
}

std::string obfuscate_date(const EntityChunk& chunk, const RewritePolicy& policy, const PatientContext& ctx,
                           const DateLocale& dates) {
  ParsedDate parsed;
  try {
    parsed = parse_date(chunk.text, dates);
  } catch (const NotADateError&) {
    return fallback_for(chunk, policy, ctx);
  }
  const ParsedDate shifted = shift_date(parsed, ctx.day_shift);
  std::string out = render_date(shifted, dates);
  if (policy.length_mode != LengthMode::SameLength) return out;

  const std::u32string want = skeleton(to_u32(chunk.text));
  if (skeleton(to_u32(out)) == want) return out;
  for (const auto& f : dates.formats()) {
    if (f.needs_day() && !shifted.has_day) continue;
    std::string alt = render_date(shifted, f.id, dates);
    if (skeleton(to_u32(alt)) == want) return alt;
  }
  return shape_surrogate(chunk.text, ctx.key("date-shape", chunk.text));
}

}  // namespace

std::optional<RewriteMode> parse_rewrite_mode(std::string_view s) noexcept {
  if (s == "mask-entity") return RewriteMode::MaskEntity;
  if (s == "mask-fixed") return RewriteMode::MaskFixed;
  if (s == "mask-length" || s == "mask-same-length") return RewriteMode::MaskSameLength;
  if (s == "obfuscate") return RewriteMode::Obfuscate;
  return std::nullopt;
}

std::string_view rewrite_mode_name(RewriteMode m) noexcept {
  switch (m) {
    case RewriteMode::MaskEntity: return "mask-entity";
    case RewriteMode::MaskFixed: return "mask-fixed";
    case RewriteMode::MaskSameLength: return "mask-length";
    case RewriteMode::Obfuscate: return "obfuscate";
  }
  return "?";
}

void RewritePolicy::validate() const {
  if (fixed_mask_width < 1) throw ConfigError("fixed mask width must be at least 1");
}

bool RewritePolicy::whitelisted(Label label) const {
  return whitelist.count(label) || whitelist.count(taxonomy.to_coarse(label));
}

std::string mask_for(const EntityChunk& chunk, const RewritePolicy& policy) {
  switch (policy.mode) {
    case RewriteMode::MaskFixed: return std::string(policy.fixed_mask_width, '*');
    case RewriteMode::MaskSameLength: return std::string(char_length(chunk.text), '*');
    case RewriteMode::MaskEntity:
    case RewriteMode::Obfuscate: break;
  }
  return mask_name(chunk.label);
}

RewriteResult rewrite(const Document& doc, const MergedChunks& merged, const RewritePolicy& policy,
                      PatientContext& ctx, const Faker& faker, const DateLocale& dates) {
  const Text text(doc.text);
  RewriteResult result;
  result.text.reserve(doc.text.size());
  std::size_t in_cursor = 0;   // code points
  std::size_t out_length = 0;  // code points written so far

  for (const auto& chunk : merged.chunks) {
    if (chunk.span.start < in_cursor) {
      throw InternalError("overlapping or unsorted chunks reached rewrite in document '" + doc.id + "'");
    }
    if (chunk.span.empty() || chunk.span.end > text.size() || text.slice_view(chunk.span) != chunk.text) {
      throw InternalError("chunk text does not match document '" + doc.id + "' at " +
                          std::to_string(chunk.span.start));
    }
    if (policy.whitelisted(chunk.label)) continue;

    std::string replacement;
    if (policy.mode != RewriteMode::Obfuscate) {
      replacement = mask_for(chunk, policy);
    } else if (chunk.label == Label::Date) {
      replacement = obfuscate_date(chunk, policy, ctx, dates);
    } else {
      auto s = faker.surrogate(chunk, ctx, policy.length_mode);
      replacement = s ? *s : fallback_for(chunk, policy, ctx);
    }

    const Span gap{in_cursor, chunk.span.start};
    result.text += text.slice_view(gap);
    out_length += gap.length();
    const std::size_t rep_length = char_length(replacement);
    result.text += replacement;
    result.replacements.push_back({chunk, replacement, Span{out_length, out_length + rep_length}});
    out_length += rep_length;
    in_cursor = chunk.span.end;
  }
  result.text += text.slice_view(Span{in_cursor, text.size()});
  return result;
}

std::string replay(std::string_view original, std::span<const Replacement> replacements) {
  const Text text{std::string(original)};
  std::string out;
  std::size_t cursor = 0;
  for (const auto& r : replacements) {
    if (r.chunk.span.start < cursor) throw InternalError("replacement log is not ordered");
    out += text.slice_view(Span{cursor, r.chunk.span.start});
    out += r.replacement;
    cursor = r.chunk.span.end;
  }
  out += text.slice_view(Span{cursor, text.size()});
  return out;
}

}  // namespace deid
