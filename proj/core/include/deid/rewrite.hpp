#pragma once

// Final text production: masking or obfuscation of merged chunks. Text
// outside chunks is copied byte for byte.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deid/datetime.hpp"
#include "deid/faker.hpp"
#include "deid/merge.hpp"
#include "deid/model.hpp"

namespace deid {

enum class RewriteMode : std::uint8_t { MaskEntity, MaskFixed, MaskSameLength, Obfuscate };

/// "mask-entity", "mask-fixed", "mask-length" (or "mask-same-length"), "obfuscate".
std::optional<RewriteMode> parse_rewrite_mode(std::string_view s) noexcept;
std::string_view rewrite_mode_name(RewriteMode m) noexcept;

/// What obfuscation does with a chunk it cannot normalize (an unparseable
/// date, an age without a number): mask it, or replace it with random
/// characters of the same shape.
enum class Fallback : std::uint8_t { Mask, Random };

struct RewritePolicy {
  RewriteMode mode = RewriteMode::MaskEntity;
  std::size_t fixed_mask_width = 3;
  /// Labels left untouched. A coarse label covers its granular children.
  std::set<Label> whitelist;
  LengthMode length_mode = LengthMode::Free;
  Fallback fallback = Fallback::Mask;
  Taxonomy taxonomy;

  /// Throws ConfigError when fixed_mask_width is 0.
  void validate() const;
  bool whitelisted(Label label) const;
};

struct Replacement {
  EntityChunk chunk;
  std::string replacement;
  Span output_span;
};

struct RewriteResult {
  std::string text;
  /// Ordered by input span.
  std::vector<Replacement> replacements;
};

/// Mask string for masking modes (and the Mask fallback).
std::string mask_for(const EntityChunk& chunk, const RewritePolicy& policy);

/// Throws InternalError when chunks overlap or disagree with the text.
RewriteResult rewrite(const Document& doc, const MergedChunks& merged, const RewritePolicy& policy,
                      PatientContext& ctx, const Faker& faker, const DateLocale& dates);

/// Applies a replacement log to the original text.
std::string replay(std::string_view original, std::span<const Replacement> replacements);

}  // namespace deid
