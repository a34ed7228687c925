#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "geniuskit/extractors.hpp"
#include "geniuskit/textcore.hpp"

namespace geniuskit {

enum class SketchTemplate { kT1, kT2, kT3, kT4, kT4Random };

std::string_view to_string(SketchTemplate t);
/// Accepts t1, t2, t3, t4, t4random (case-insensitive).
SketchTemplate parse_template(std::string_view name);

/// Kept (unmasked) token spans of one document.
///
/// `document` is non-owning; the Document must outlive the projection.
struct Projection {
  const Document* document = nullptr;
  std::vector<Span> kept_spans;       // merged, in document order
  std::vector<Keyword> keyword_order;  // importance order, only keywords that occur
  std::vector<Span> keyword_first;     // first occurrence of each keyword_order entry
  std::vector<std::string> warnings;   // keywords skipped for lack of occurrences

  std::size_t kept_words() const;
};

struct Fragment {
  std::string text;
  friend bool operator==(const Fragment&, const Fragment&) = default;
};
struct Mask {
  friend bool operator==(const Mask&, const Mask&) = default;
};
using SketchElement = std::variant<Fragment, Mask>;

struct Sketch {
  std::vector<SketchElement> elements;
  SketchTemplate kind = SketchTemplate::kT4;
  std::string mask_token = std::string(kDefaultMaskToken);
  std::optional<std::string> prompt;
  std::vector<std::string> source_ids;

  /// Elements joined by single spaces, masks rendered as mask_token. The prompt is not included.
  std::string text() const;
  std::vector<std::string> fragments() const;
  std::size_t mask_count() const;
};

/// Splits rendered sketch text back into fragments around `mask_token`.
std::vector<std::string> sketch_fragments(std::string_view sketch_text,
                                          std::string_view mask_token = kDefaultMaskToken);

struct SketchTextPair {
  std::string sketch;
  std::string text;
};

nlohmann::json to_json(const SketchTextPair& pair);
/// {"sketch": ..., "text": ...} on one line, no trailing newline.
std::string to_jsonl_line(const SketchTextPair& pair);

/// Keywords from plain strings, ranked in the given order.
std::vector<Keyword> keywords_from_strings(std::span<const std::string> surfaces);

/// Marks every case-insensitive, within-sentence occurrence of every keyword
/// and merges overlapping or adjacent occurrences.
Projection project(const Document& document, std::span<const Keyword> keywords);
/// Projection over externally chosen spans (random extraction).
Projection project_spans(const Document& document, std::vector<Span> spans);

Sketch render(const Projection& projection, SketchTemplate kind,
              std::string_view mask_token = kDefaultMaskToken);

/// 1 - kept words / l. Throws InvalidArgument when the document has no words.
double masking_ratio(const Projection& projection);
double kept_fraction(const Projection& projection);

struct MixupInput {
  std::string id;
  std::string label;
  std::vector<std::string> fragments;
};

/// Round-robin interleave of the inputs' fragments, one mask between each pair
/// and at both ends. Inputs without fragments are skipped; fewer than two
/// usable inputs or differing labels raise InvalidArgument.
Sketch mixup_sketch(std::span<const MixupInput> inputs, std::string_view mask_token = kDefaultMaskToken);

struct PairConfig {
  ExtractorConfig extractor;
  SketchTemplate kind = SketchTemplate::kT4;
  std::string mask_token = std::string(kDefaultMaskToken);
  std::size_t min_words = 50;
  std::size_t max_words = 200;
  std::size_t max_sentences = 0;  // 0 disables the sentence filter
  std::vector<std::string> keyword_override;  // bypasses extraction when non-empty
};

struct PairOutcome {
  std::optional<SketchTextPair> pair;
  std::string skip_reason;  // "empty" or "length" when pair is absent
  double masking_ratio = 0.0;
};

/// Extraction, projection and rendering of one document into a <sketch, text> pair.
PairOutcome build_pair(const Document& document, const PairConfig& config);

}  // namespace geniuskit
