#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "geniuskit/extractors.hpp"
#include "geniuskit/sketcher.hpp"
#include "geniuskit/svc_clients.hpp"

namespace geniuskit {

struct ClassificationRecord {
  std::string id;
  std::string text;
  std::string label;
  std::vector<std::string> provenance;  // source record ids for augmented records
};

struct NerSequence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::vector<std::string> provenance;
};

struct MrcExample {
  std::string id;
  std::string paragraph;
  std::string question;
  std::string answer;
  std::size_t answer_start = 0;  // byte offset into paragraph
  std::vector<std::string> provenance;

  bool answer_matches() const;
};

/// Counts for one augmentation run. attempted == emitted + discarded + failed.
struct RunReport {
  std::size_t attempted = 0;
  std::size_t emitted = 0;
  std::size_t discarded = 0;  // generated but unusable (no entity match, answer lost)
  std::size_t failed = 0;     // backend errors

  RunReport& operator+=(const RunReport& other);
  nlohmann::json to_json() const;
};

enum class RelabelMode {
  kDefault,       // unmatched tokens tagged "O"
  kConservative,  // unmatched tokens tagged "X", excluded from the loss downstream
};

struct AugmentOptions {
  ExtractorConfig extractor;
  bool attribute_control = true;
  std::string separator = ":";
  std::string mask_token = std::string(kDefaultMaskToken);
  int max_new_tokens = 200;
  int num_beams = 4;
  bool do_sample = true;
  std::optional<int> top_k;
  std::optional<double> top_p;
  std::uint64_t seed = 0;
  int workers = 1;
  RelabelMode relabel_mode = RelabelMode::kDefault;
  std::size_t mixup_k = 0;  // >= 2 switches classification to sketch mixup
};

/// Seed for output `output_index` of record `record_index` under a root seed.
std::uint64_t output_seed(std::uint64_t root, std::size_t record_index, std::size_t output_index);

/// Removes a leading echo of `prompt` + `separator` (whitespace-tolerant).
/// Text that does not start with the echo is returned unchanged.
std::string strip_prompt(std::string_view generated, std::string_view prompt, std::string_view separator);

/// Target-aware T4 sketch of `text` with `tri` as target-related information.
Sketch target_aware_sketch(std::string_view text, const TargetInfo& tri, Embedder& embedder,
                           const ExtractorConfig& config, std::string_view mask_token);

// ---- classification -------------------------------------------------------

struct ClassificationOutput {
  std::vector<ClassificationRecord> records;
  RunReport report;
};

/// `multiplier` new records from one record; the label is the target-related
/// information and, with attribute control, the generation prompt.
ClassificationOutput augment_classification(const ClassificationRecord& record, std::size_t record_index,
                                            std::size_t multiplier, const AugmentOptions& options,
                                            Generator& generator, Embedder& embedder);

/// Whole-corpus run; sketch mixup when options.mixup_k >= 2. Output follows input order.
ClassificationOutput augment_classification_corpus(std::span<const ClassificationRecord> records,
                                                   std::size_t multiplier, const AugmentOptions& options,
                                                   Generator& generator, Embedder& embedder);

// ---- NER -------------------------------------------------------------------

/// Entity surface (tokens joined by single spaces) to entity type, harvested
/// from BIO-tagged training sequences. A surface seen with several types keeps
/// the most frequent one (first seen on ties).
class Gazetteer {
 public:
  static Gazetteer build(std::span<const NerSequence> training);
  void add(std::span<const std::string> tokens, const std::string& type);

  std::optional<std::string> type_of(std::string_view surface) const;
  std::size_t max_tokens() const { return max_tokens_; }
  std::size_t size() const { return types_.size(); }

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> counts_;
  std::unordered_map<std::string, std::string> types_;
  std::vector<std::string> order_;
  std::size_t max_tokens_ = 0;
};

/// Entity mentions of a BIO sequence as (token span, type). Malformed I- tags start a new mention.
std::vector<std::pair<Span, std::string>> bio_entities(std::span<const std::string> tags);
bool bio_well_formed(std::span<const std::string> tags);

/// Longest-match, left-to-right, case-sensitive gazetteer tagging.
std::vector<std::string> relabel(std::span<const std::string> tokens, const Gazetteer& gazetteer,
                                 RelabelMode mode = RelabelMode::kDefault);

struct TokenSource {
  std::size_t sequence = 0;  // index into the input sequences
  std::size_t token = 0;
};

struct Passage {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::vector<TokenSource> source;  // one entry per token
  std::vector<std::string> source_ids;
};

/// Greedy concatenation of consecutive sequences up to max_words tokens. A
/// sequence longer than max_words forms a passage of its own.
std::vector<Passage> concat_sequences(std::span<const NerSequence> sequences, std::size_t max_words = 100);

struct NerOutput {
  std::vector<NerSequence> sequences;
  RunReport report;
};

NerOutput augment_ner(std::span<const Passage> passages, const Gazetteer& gazetteer, std::size_t multiplier,
                      const AugmentOptions& options, Generator& generator, Embedder& embedder);

// ---- MRC -------------------------------------------------------------------

struct MrcOutput {
  std::vector<MrcExample> examples;
  RunReport report;
};

/// Keeps the answer sentence verbatim and regenerates the context around it
/// from target-aware sketches of the preceding and following text.
MrcOutput augment_mrc(const MrcExample& example, std::size_t example_index, std::size_t multiplier,
                      const AugmentOptions& options, Generator& generator, Embedder& embedder);

MrcOutput augment_mrc_corpus(std::span<const MrcExample> examples, std::size_t multiplier,
                             const AugmentOptions& options, Generator& generator, Embedder& embedder);

/// The sketch sent to the generator for `example`, and the verbatim answer sentence inside it.
struct MrcSketch {
  std::string sketch;
  std::string answer_sentence;
};
MrcSketch mrc_sketch(const MrcExample& example, const AugmentOptions& options, Embedder& embedder);

// ---- fine-tuning pairs -----------------------------------------------------

/// Target-aware sketch (label as target information) paired with the original
/// text; the label prompt is prepended when attribute control is on.
std::vector<SketchTextPair> build_finetune_pairs(std::span<const ClassificationRecord> records,
                                                 const AugmentOptions& options, Embedder& embedder);

}  // namespace geniuskit
