#include "geniuskit/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "geniuskit/augmenters.hpp"
#include "geniuskit/error.hpp"
#include "geniuskit/parallel.hpp"

namespace geniuskit {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
  pair.extractor.validate();
  if (pair.min_words > pair.max_words) throw InvalidArgument("min words must not exceed max words");
  if (workers < 1) throw InvalidArgument("worker count must be >= 1");
  if (shard_size < 1) throw InvalidArgument("shard size must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
}

json PipelineConfig::content_settings() const {
  const auto& topk = pair.extractor.topk;
  json j;
  j["template"] = std::string(to_string(pair.kind));
  j["mask_token"] = pair.mask_token;
  j["min_words"] = pair.min_words;
  j["max_words"] = pair.max_words;
  j["max_sentences"] = pair.max_sentences;
  j["max_ngram"] = pair.extractor.max_ngram;
  j["topk"] = {{"kind", static_cast<int>(topk.kind)}, {"minimum", topk.minimum}, {"fixed", topk.fixed}};
  j["dedup_similarity"] = pair.extractor.dedup_similarity;
  j["stopwords"] = pair.extractor.stopwords ? pair.extractor.stopwords->size() : 0;
  j["keyword_override"] = pair.keyword_override;
  j["seed"] = seed;
  j["shard_size"] = shard_size;
  return j;
}

std::string PipelineConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : content_settings().dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t RunManifest::skipped_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : skipped) n += count;
  return n;
}

json RunManifest::to_json() const {
  json j;
  j["input"] = input;
  j["output_dir"] = output_dir;
  j["config_hash"] = config_hash;
  j["counts"] = {{"read", read}, {"emitted", emitted}, {"skipped", skipped}};
  j["shards"] = shards;
  j["wall_seconds"] = wall_seconds;
  json workers = json::array();
  for (std::size_t w = 0; w < per_worker_docs.size(); ++w) {
    workers.push_back({{"worker", w},
                       {"docs", per_worker_docs[w]},
                       {"docs_per_second", wall_seconds > 0 ? per_worker_docs[w] / wall_seconds : 0.0}});
  }
  j["per_worker"] = workers;
  j["masking_ratio"] = {{"mean", masking_ratio_mean}, {"std", masking_ratio_std}};
  return j;
}

std::string shard_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pairs-%05zu.jsonl", index);
  return buf;
}

DocResult process_line(const std::string& line, std::size_t doc_index, const PipelineConfig& config) {
  DocResult r;
  r.worker = parallel::worker_index();
  json record;
  try {
    record = json::parse(line);
  } catch (const json::exception&) {
    r.skip_reason = "parse";
    return r;
  }
  if (!record.is_object() || !record.contains("text") || !record["text"].is_string()) {
    r.skip_reason = "parse";
    return r;
  }
  PairConfig pair = config.pair;
  pair.extractor.seed = output_seed(config.seed, doc_index, 0);
  const Document doc = tokenize(record["text"].get<std::string>());
  const PairOutcome outcome = build_pair(doc, pair);
  if (!outcome.pair) {
    r.skip_reason = outcome.skip_reason;
    return r;
  }
  r.line = to_jsonl_line(*outcome.pair);
  r.masking_ratio = outcome.masking_ratio;
  return r;
}

std::vector<DocResult> process_batch_serial(const std::vector<std::string>& lines, std::size_t first_index,
                                            const PipelineConfig& config) {
  return parallel::map_serial(lines.size(),
                              [&](std::size_t i) { return process_line(lines[i], first_index + i, config); });
}

std::vector<DocResult> process_batch(const std::vector<std::string>& lines, std::size_t first_index,
                                     const PipelineConfig& config) {
  return parallel::map_ordered(lines.size(), config.workers,
                               [&](std::size_t i) { return process_line(lines[i], first_index + i, config); });
}

namespace {

bool is_output_file(const fs::path& p) {
  const std::string name = p.filename().string();
  return name == "manifest.json" || name == "manifest.json.tmp" ||
         (name.rfind("pairs-", 0) == 0 && (p.extension() == ".jsonl" || p.extension() == ".tmp"));
}

void remove_outputs(const fs::path& dir) {
  if (!fs::exists(dir)) return;
  std::vector<fs::path> doomed;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_output_file(entry.path())) doomed.push_back(entry.path());
  }
  for (const auto& p : doomed) fs::remove(p);
}

class ShardWriter {
 public:
  ShardWriter(fs::path dir, std::size_t shard_size) : dir_(std::move(dir)), shard_size_(shard_size) {}
  ~ShardWriter() {
    if (out_.is_open()) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_path(), ec);
    }
  }

  void write(const std::string& line) {
    if (!out_.is_open()) open();
    out_ << line << '\n';
    if (!out_) throw Error("write failed: " + tmp_path().string());
    if (++in_shard_ == shard_size_) close();
  }

  void close() {
    if (!out_.is_open()) return;
    out_.close();
    if (!out_) throw Error("close failed: " + tmp_path().string());
    fs::rename(tmp_path(), dir_ / shard_name(index_));
    names_.push_back(shard_name(index_));
    ++index_;
    in_shard_ = 0;
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path tmp_path() const { return dir_ / (shard_name(index_) + ".tmp"); }
  void open() {
    out_.open(tmp_path(), std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot open shard for writing: " + tmp_path().string());
  }

  fs::path dir_;
  std::size_t shard_size_;
  std::ofstream out_;
  std::size_t index_ = 0;
  std::size_t in_shard_ = 0;
  std::vector<std::string> names_;
};

}  // namespace

RunManifest build_pretrain_dataset(const fs::path& input, const fs::path& output_dir, const PipelineConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::ifstream in(input);
  if (!in) throw InvalidArgument("cannot open input " + input.string());

  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec || !fs::is_directory(output_dir)) throw Error("cannot create output directory " + output_dir.string());
  bool has_output = false;
  for (const auto& entry : fs::directory_iterator(output_dir)) has_output |= is_output_file(entry.path());
  if (has_output) {
    if (!config.overwrite) {
      throw InvalidArgument("output directory " + output_dir.string() + " already holds a run; pass --overwrite");
    }
    remove_outputs(output_dir);
  }

  RunManifest manifest;
  manifest.input = input.string();
  manifest.output_dir = output_dir.string();
  manifest.config_hash = config.hash();
  manifest.per_worker_docs.assign(static_cast<std::size_t>(config.workers), 0);

  double ratio_sum = 0.0, ratio_sq = 0.0;
  try {
    ShardWriter writer(output_dir, config.shard_size);
    std::vector<std::string> batch;
    std::size_t doc_index = 0;
    auto flush = [&] {
      const auto results = process_batch(batch, doc_index, config);
      for (const auto& r : results) {
        ++manifest.read;
        const auto w = static_cast<std::size_t>(r.worker);
        if (w < manifest.per_worker_docs.size()) ++manifest.per_worker_docs[w];
        if (!r.skip_reason.empty()) {
          ++manifest.skipped[r.skip_reason];
          continue;
        }
        writer.write(r.line);
        ++manifest.emitted;
        ratio_sum += r.masking_ratio;
        ratio_sq += r.masking_ratio * r.masking_ratio;
      }
      doc_index += batch.size();
      batch.clear();
    };
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      batch.push_back(std::move(line));
      if (batch.size() >= config.batch_size) flush();
    }
    if (!batch.empty()) flush();
    writer.close();
    manifest.shards = writer.names();
  } catch (...) {
    std::error_code ignore;
    std::vector<fs::path> partial;
    for (const auto& entry : fs::directory_iterator(output_dir, ignore)) {
      if (entry.path().extension() == ".tmp") partial.push_back(entry.path());
    }
    for (const auto& p : partial) fs::remove(p, ignore);
    throw;
  }

  if (manifest.emitted > 0) {
    const double n = static_cast<double>(manifest.emitted);
    manifest.masking_ratio_mean = ratio_sum / n;
    manifest.masking_ratio_std = std::sqrt(std::max(0.0, ratio_sq / n - manifest.masking_ratio_mean * manifest.masking_ratio_mean));
  }
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path tmp = output_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    out << manifest.to_json().dump(2) << '\n';
    if (!out) throw Error("cannot write manifest " + tmp.string());
  }
  fs::rename(tmp, output_dir / "manifest.json");
  return manifest;
}

}  // namespace geniuskit
