#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "geniuskit/sketcher.hpp"

namespace geniuskit {

struct PipelineConfig {
  PairConfig pair;  // extractor, template, mask token, length bounds
  int workers = 1;
  std::size_t shard_size = 10000;
  std::size_t batch_size = 4096;  // documents held in memory at once
  std::uint64_t seed = 0;
  bool overwrite = false;
  std::string generate_url;
  std::string embed_url;

  void validate() const;
  /// Settings that influence output bytes; worker count and paths excluded.
  nlohmann::json content_settings() const;
  std::string hash() const;
};

struct RunManifest {
  std::string input;
  std::string output_dir;
  std::string config_hash;
  std::size_t read = 0;
  std::size_t emitted = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count
  std::vector<std::string> shards;
  double wall_seconds = 0.0;
  std::vector<std::size_t> per_worker_docs;
  double masking_ratio_mean = 0.0;
  double masking_ratio_std = 0.0;

  std::size_t skipped_total() const;
  nlohmann::json to_json() const;
};

/// Result of processing one input line.
struct DocResult {
  std::string line;          // serialized pair when emitted
  std::string skip_reason;   // non-empty when skipped
  double masking_ratio = 0.0;
  int worker = 0;
};

/// Per-document kernel: parse a JSON Lines record, build its sketch pair.
/// Randomness is seeded from (config.seed, doc_index) only.
DocResult process_line(const std::string& line, std::size_t doc_index, const PipelineConfig& config);

/// Batch kernels over consecutive lines starting at `first_index`.
std::vector<DocResult> process_batch_serial(const std::vector<std::string>& lines, std::size_t first_index,
                                            const PipelineConfig& config);
std::vector<DocResult> process_batch(const std::vector<std::string>& lines, std::size_t first_index,
                                     const PipelineConfig& config);

/// Reads JSON Lines with a "text" field and writes pairs-NNNNN.jsonl shards plus
/// manifest.json into `output_dir`. Shards are written as .tmp files and renamed
/// once complete. Existing output is only replaced when config.overwrite is set.
RunManifest build_pretrain_dataset(const std::filesystem::path& input, const std::filesystem::path& output_dir,
                                   const PipelineConfig& config);

std::string shard_name(std::size_t index);

}  // namespace geniuskit
