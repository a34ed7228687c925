#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "geniuskit/sketcher.hpp"

// Model-free scores for sketch-conditioned generation. Every text is tokenized
// with the toolkit tokenizer and case-folded; punctuation tokens count as
// tokens. Percentages are in [0, 100].
namespace geniuskit::metrics {

/// Mean of the word-level (distinct sketch tokens missing from the output) and
/// fragment-level (fragments not found as contiguous token runs) missing rates.
/// Throws InvalidArgument when the sketch has no fragments.
double sketch_lost(std::string_view sketch_text, std::string_view generated,
                   std::string_view mask_token = kDefaultMaskToken);
double sketch_lost(const Sketch& sketch, std::string_view generated);

/// Mean of clipped unigram recall, clipped bigram recall and LCS recall.
/// Bigram recall is 0 when the original has fewer than two tokens.
double recall(std::string_view original, std::string_view generated);

/// Share of the generated vocabulary that does not occur in the original.
double diversity(std::string_view original, std::string_view generated);

/// Generated token count over original token count.
double length_ratio(std::string_view original, std::string_view generated);

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

RougeScore rouge_n(std::string_view reference, std::string_view candidate, int n);
RougeScore rouge_l(std::string_view reference, std::string_view candidate);

/// Token-level kernels behind the string entry points.
double ngram_recall(std::span<const std::string> original, std::span<const std::string> generated, int n);
bool contains_run(std::span<const std::string> haystack, std::span<const std::string> needle);

struct EvalRecord {
  std::string original;
  std::string sketch;
  std::string generated;
};

struct RecordScores {
  double sketch_lost = 0.0;
  double recall = 0.0;
  double diversity = 0.0;
  double length_ratio = 0.0;
  double masking_ratio = 0.0;  // percent of original words absent from the sketch fragments
};

struct MetricReport {
  double sketch_lost = 0.0;
  double recall = 0.0;
  double diversity = 0.0;
  double length_ratio = 0.0;
  double masking_ratio_mean = 0.0;
  double masking_ratio_std = 0.0;
  std::size_t n = 0;
  std::optional<double> perplexity;  // supplied by external scorers
  std::optional<double> clf_error;

  nlohmann::json to_json() const;
};

/// Replaces every mask token with a space, so unfilled masks do not count as output words.
std::string strip_masks(std::string_view text, std::string_view mask_token = kDefaultMaskToken);

/// Scores one record; mask tokens left in `generated` are ignored.
RecordScores score_record(const EvalRecord& record, std::string_view mask_token = kDefaultMaskToken);

/// Unweighted means over records. Per-record scores are computed in parallel
/// when workers > 1 and reduced in record order, so the report does not depend
/// on the worker count.
MetricReport evaluate_corpus(std::span<const EvalRecord> records,
                             std::string_view mask_token = kDefaultMaskToken, int workers = 1);

}  // namespace geniuskit::metrics
