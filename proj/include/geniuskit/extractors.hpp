#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "geniuskit/stopwords.hpp"
#include "geniuskit/svc_clients.hpp"
#include "geniuskit/textcore.hpp"

namespace geniuskit {

struct Keyword {
  std::string surface;  // words of the first occurrence, original casing, single-spaced
  std::string folded;   // matching key
  double score = 0.0;
  std::size_t rank = 0;
};

struct TargetInfo {
  enum class Kind { kClassLabel, kEntityList, kQuestion };
  std::string text;
  Kind kind = Kind::kClassLabel;
};

/// How many keywords to keep for a document of l words.
struct TopkRule {
  enum class Kind { kCeilFifth, kFloorFifth, kFixed };
  Kind kind = Kind::kCeilFifth;
  std::size_t minimum = 10;
  std::size_t fixed = 10;

  std::size_t operator()(std::size_t l) const;
  /// "ceil" (default), "floor", or a positive integer for a fixed count.
  static TopkRule parse(const std::string& text);
};

struct ExtractorConfig {
  int max_ngram = 3;
  TopkRule topk;
  double keep_ratio = 0.20;
  double lambda = 0.5;
  const StopwordSet* stopwords = &StopwordSet::english();
  std::uint64_t seed = 0;
  double dedup_similarity = 0.9;

  void validate() const;
};

/// One distinct candidate phrase of a document.
struct Candidate {
  std::string folded;
  std::string surface;
  Span first;  // first occurrence
  int n = 0;
  std::size_t count = 0;
};

/// Word n-grams (1..max_ngram) that neither start nor end with a stopword or a
/// bare number, deduplicated by folded surface, in first-occurrence order.
std::vector<Candidate> collect_candidates(const Document& document, const ExtractorConfig& config);

/// Statistical keyword extraction in the YAKE family. Lower score is better;
/// the result is ranked ascending and truncated to config.topk(l) after
/// near-duplicate removal.
std::vector<Keyword> yake_extract(const Document& document, const ExtractorConfig& config);

/// Random non-overlapping n-grams until at least ceil(l/5) words are kept.
/// Deterministic for a given seed.
std::vector<Span> random_extract(const Document& document, const ExtractorConfig& config);

/// lambda * doc + (1 - lambda) * target, componentwise.
Embedding fuse_embeddings(const Embedding& doc, const Embedding& target, double lambda);

/// Cosine similarity; 0 when either vector is zero.
double cosine(const Embedding& u, const Embedding& v);

/// Ranks the document's distinct candidates by cosine similarity to the fused
/// document/target embedding and keeps the top ceil(keep_ratio * count), at
/// least one. Ties go to the earlier first occurrence, then to the shorter n.
std::vector<Keyword> target_aware_extract(const Document& document, const TargetInfo& tri,
                                          Embedder& embedder, const ExtractorConfig& config);

/// Normalized Levenshtein similarity in [0, 1] over bytes.
double edit_similarity(std::string_view a, std::string_view b);

}  // namespace geniuskit
