// geniuskit: sketch extraction, pre-training pair building, sketch-based
// augmentation and evaluation from the command line.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "geniuskit/augmenters.hpp"
#include "geniuskit/error.hpp"
#include "geniuskit/io.hpp"
#include "geniuskit/metrics.hpp"
#include "geniuskit/pipeline.hpp"
#include "geniuskit/sketcher.hpp"
#include "geniuskit/stopwords.hpp"
#include "geniuskit/svc_clients.hpp"

namespace gk = geniuskit;
using nlohmann::json;

namespace {

constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Opens "-" as stdin/stdout, anything else as a file.
class InputFile {
 public:
  explicit InputFile(const std::string& path) {
    if (path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw gk::InvalidArgument("cannot open " + path);
  }
  std::istream& get() { return file_.is_open() ? static_cast<std::istream&>(file_) : std::cin; }

 private:
  std::ifstream file_;
};

class OutputFile {
 public:
  explicit OutputFile(const std::string& path) : path_(path) {
    if (path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw gk::InvalidArgument("cannot write " + path);
  }
  std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    get().flush();
    if (!get()) throw gk::Error("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared extractor flags.
struct ExtractorFlags {
  int max_ngram = 3;
  std::string topk_rule = "ceil";
  std::size_t topk_min = 10;
  double keep_ratio = 0.2;
  double lambda = 0.5;
  std::string stopwords_file;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app, bool target_aware) {
    app.add_option("--max-ngram", max_ngram, "Longest candidate phrase in words")->check(CLI::Range(1, 8));
    app.add_option("--topk-rule", topk_rule, "Keyword count rule: ceil, floor or a fixed integer");
    app.add_option("--topk-min", topk_min, "Lower bound on the keyword count");
    app.add_option("--stopwords", stopwords_file, "Stopword list, one word per line")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Root seed for all randomness");
    if (target_aware) {
      app.add_option("--tri-lambda", lambda, "Weight of the document embedding against the target")
          ->check(CLI::Range(0.0, 1.0));
      app.add_option("--keep-ratio", keep_ratio, "Share of candidates kept by target-aware extraction")
          ->check(CLI::Range(0.0, 1.0));
    }
  }

  gk::ExtractorConfig build(std::unique_ptr<gk::StopwordSet>& storage) const {
    gk::ExtractorConfig c;
    c.max_ngram = max_ngram;
    c.topk = gk::TopkRule::parse(topk_rule);
    c.topk.minimum = topk_min;
    c.keep_ratio = keep_ratio;
    c.lambda = lambda;
    c.seed = seed;
    if (!stopwords_file.empty()) {
      storage = std::make_unique<gk::StopwordSet>(gk::StopwordSet::from_file(stopwords_file));
      c.stopwords = storage.get();
    }
    c.validate();
    return c;
  }
};

// Backend selection: in-process stubs or the HTTP services.
struct BackendFlags {
  bool stub = false;
  std::string backend_url;
  std::string embed_url;
  std::string filler = "filler";
  std::size_t in_flight = 8;

  void add_to(CLI::App& app, bool needs_generator) {
    auto* s = app.add_flag("--stub", stub, "Use the deterministic in-process stub backends");
    auto* b = app.add_option("--backend-url", backend_url,
                             needs_generator ? "Generation service base URL (default $GENIUSKIT_GEN_URL)"
                                             : "Service base URL for both endpoints");
    auto* e = app.add_option("--embed-url", embed_url, "Embedding service base URL (default $GENIUSKIT_EMB_URL)");
    s->excludes(b)->excludes(e);
    app.add_option("--filler", filler, "Mask filler used by the stub generator")->needs(s);
    app.add_option("--max-in-flight", in_flight, "Concurrent requests per backend")->check(CLI::PositiveNumber);
  }

  struct Backends {
    std::unique_ptr<gk::Generator> generator_owner;
    std::unique_ptr<gk::Embedder> embedder_owner;
    std::shared_ptr<gk::HttpBackend> http;
    gk::Generator* generator = nullptr;
    gk::Embedder* embedder = nullptr;
  };

  Backends build(const std::string& mask_token) const {
    Backends b;
    if (stub) {
      b.generator_owner = std::make_unique<gk::EchoStub>(filler, mask_token);
      b.embedder_owner = std::make_unique<gk::HashEmbedder>();
      b.generator = b.generator_owner.get();
      b.embedder = b.embedder_owner.get();
      return b;
    }
    gk::HttpBackendOptions o;
    o.generate_url = env_or(backend_url, "GENIUSKIT_GEN_URL");
    o.embed_url = embed_url.empty() ? env_or(backend_url, "GENIUSKIT_EMB_URL") : embed_url;
    if (o.embed_url.empty()) o.embed_url = o.generate_url;
    if (o.generate_url.empty() && o.embed_url.empty()) {
      throw UsageError("no backend: pass --stub, --backend-url, or set GENIUSKIT_GEN_URL/GENIUSKIT_EMB_URL");
    }
    if (o.generate_url.empty()) o.generate_url = o.embed_url;
    o.max_in_flight = static_cast<std::ptrdiff_t>(in_flight);
    b.http = std::make_shared<gk::HttpBackend>(o);
    b.generator = b.http.get();
    b.embedder = b.http.get();
    return b;
  }

 private:
  static std::string env_or(const std::string& value, const char* var) {
    if (!value.empty()) return value;
    const char* env = std::getenv(var);
    return env ? env : "";
  }
};

// ---- sketch ------------------------------------------------------------------

struct SketchCommand {
  std::string input = "-";
  std::string output = "-";
  std::string templ = "t4";
  std::string mask_token = std::string(gk::kDefaultMaskToken);
  std::string keywords_file;
  std::string format = "auto";
  std::size_t min_words = 0;
  std::size_t max_words = std::numeric_limits<std::size_t>::max();
  ExtractorFlags extractor;

  void add_to(CLI::App& parent) {
    auto* app = parent.add_subcommand("sketch", "Turn documents into sketches");
    app->add_option("input", input, "Input file, '-' for stdin (JSON Lines with \"text\", or plain text)");
    app->add_option("-o,--output", output, "Output file, '-' for stdout");
    app->add_option("--template", templ, "Sketch template")
        ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t4random"}, CLI::ignore_case));
    app->add_option("--mask-token", mask_token, "Mask token")->check([](const std::string& s) {
      return s.find_first_of(" \t\n") == std::string::npos && !s.empty() ? std::string() : "mask token must be one non-empty word";
    });
    app->add_option("--keywords", keywords_file, "Keyword override file, one keyword per line")
        ->check(CLI::ExistingFile);
    app->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "jsonl", "text"}));
    app->add_option("--min-words", min_words, "Skip documents shorter than this");
    app->add_option("--max-words", max_words, "Skip documents longer than this");
    extractor.add_to(*app, false);
    app->callback([this] { exit_code = run(); });
  }

  int run() {
    std::unique_ptr<gk::StopwordSet> stop;
    gk::PairConfig pc;
    pc.extractor = extractor.build(stop);
    pc.kind = gk::parse_template(templ);
    pc.mask_token = mask_token;
    pc.min_words = min_words;
    pc.max_words = max_words;
    if (!keywords_file.empty()) {
      if (pc.kind == gk::SketchTemplate::kT4Random) throw UsageError("--keywords cannot be combined with t4random");
      pc.keyword_override = gk::io::read_keyword_file(keywords_file);
      if (pc.keyword_override.empty()) throw UsageError("keyword file is empty: " + keywords_file);
    }

    InputFile in(input);
    const std::string content = slurp(in.get());
    OutputFile out(output);

    std::vector<std::string> texts;
    bool jsonl = format == "jsonl";
    if (format == "auto") jsonl = looks_like_jsonl(content);
    if (jsonl) {
      std::istringstream lines(content);
      std::size_t n = 0;
      for (const auto& line : gk::io::read_lines(lines)) {
        ++n;
        json j;
        try {
          j = json::parse(line);
        } catch (const json::exception& e) {
          throw gk::ParseError("line " + std::to_string(n) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
          throw gk::ParseError("line " + std::to_string(n) + ": missing string field \"text\"");
        }
        texts.push_back(j["text"].get<std::string>());
      }
    } else {
      texts.push_back(content);
    }

    std::size_t skipped = 0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      gk::PairConfig doc_config = pc;
      doc_config.extractor.seed = gk::output_seed(extractor.seed, i, 0);
      const auto outcome = gk::build_pair(gk::tokenize(texts[i]), doc_config);
      if (!outcome.pair) {
        ++skipped;
        std::cerr << "document " << i + 1 << " skipped: " << outcome.skip_reason << '\n';
        continue;
      }
      if (jsonl) {
        out.get() << gk::to_jsonl_line(*outcome.pair) << '\n';
      } else {
        out.get() << outcome.pair->sketch << '\n';
      }
    }
    out.finish();
    if (skipped > 0) std::cerr << skipped << " of " << texts.size() << " documents skipped\n";
    return 0;
  }

  static bool looks_like_jsonl(const std::string& content) {
    std::istringstream lines(content);
    const auto all = gk::io::read_lines(lines);
    if (all.empty()) return false;
    for (const auto& line : all) {
      const auto first = line.find_first_not_of(" \t");
      if (line[first] != '{') return false;
      try {
        const json j = json::parse(line);
        if (!j.is_object() || !j.contains("text")) return false;
      } catch (const json::exception&) {
        return false;
      }
    }
    return true;
  }

  int exit_code = 0;
};

// ---- build-dataset -------------------------------------------------------------

struct BuildDatasetCommand {
  std::string input;
  std::string output_dir;
  std::string templ = "t4";
  std::string mask_token = std::string(gk::kDefaultMaskToken);
  gk::PipelineConfig config;
  ExtractorFlags extractor;

  void add_to(CLI::App& parent) {
    auto* app = parent.add_subcommand("build-dataset", "Build sharded <sketch, text> pre-training pairs");
    app->add_option("-i,--input", input, "JSON Lines input with a \"text\" field")->required()->check(CLI::ExistingFile);
    app->add_option("-o,--output-dir", output_dir, "Directory for shards and manifest.json")->required();
    app->add_option("--template", templ, "Sketch template")
        ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t4random"}, CLI::ignore_case));
    app->add_option("--mask-token", mask_token, "Mask token");
    app->add_option("--workers", config.workers, "Worker threads")->check(CLI::Range(1, 1024));
    app->add_option("--shard-size", config.shard_size, "Pairs per shard")->check(CLI::PositiveNumber);
    app->add_option("--batch-size", config.batch_size, "Documents held in memory at once")->check(CLI::PositiveNumber);
    app->add_option("--min-words", config.pair.min_words, "Shortest accepted document");
    app->add_option("--max-words", config.pair.max_words, "Longest accepted document");
    app->add_option("--max-sentences", config.pair.max_sentences, "Most sentences per document, 0 for no limit");
    app->add_flag("--overwrite", config.overwrite, "Replace an existing run in the output directory");
    extractor.add_to(*app, false);
    app->callback([this] { exit_code = run(); });
  }

  int run() {
    std::unique_ptr<gk::StopwordSet> stop;
    config.pair.extractor = extractor.build(stop);
    config.pair.kind = gk::parse_template(templ);
    config.pair.mask_token = mask_token;
    config.seed = extractor.seed;
    if (config.pair.min_words > config.pair.max_words) throw UsageError("--min-words exceeds --max-words");
    const auto manifest = gk::build_pretrain_dataset(input, output_dir, config);
    std::cerr << "read " << manifest.read << ", emitted " << manifest.emitted << ", skipped "
              << manifest.skipped_total() << " in " << manifest.wall_seconds << " s\n";
    return 0;
  }

  int exit_code = 0;
};

// ---- augment -------------------------------------------------------------------

struct AugmentCommand {
  std::string task;
  std::string input;
  std::string output = "-";
  std::string report_path;
  std::string gazetteer_file;
  std::size_t multiplier = 1;
  std::size_t passage_words = 100;
  bool conservative = false;
  gk::AugmentOptions options;
  ExtractorFlags extractor;
  BackendFlags backend;
  std::optional<int> top_k;
  std::optional<double> top_p;

  void add_to(CLI::App& parent) {
    auto* app = parent.add_subcommand("augment", "Sketch-based data augmentation");
    app->add_option("task", task, "clf, ner or mrc")->required()->check(CLI::IsMember({"clf", "ner", "mrc"}));
    app->add_option("-i,--input", input, "Training data (JSON Lines, CoNLL, or SQuAD-style JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("-o,--output", output, "Augmented data, '-' for stdout");
    app->add_option("--report", report_path, "Write the run counts as JSON");
    app->add_option("--multiplier", multiplier, "New examples per input example")->check(CLI::PositiveNumber);
    app->add_option("--attribute-control", options.attribute_control, "Prompt the generator with the label")
        ->default_str("true");
    app->add_option("--separator", options.separator, "Text between label and sketch in the prompt");
    app->add_option("--mask-token", options.mask_token, "Mask token");
    app->add_option("--mixup-k", options.mixup_k, "Mix this many same-label sketches per output (clf)");
    app->add_flag("--conservative", conservative, "Tag unmatched NER tokens X instead of O");
    app->add_option("--gazetteer", gazetteer_file, "Extra CoNLL data for the entity gazetteer (ner)")
        ->check(CLI::ExistingFile);
    app->add_option("--passage-words", passage_words, "Concatenate NER sequences up to this length")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-new-tokens", options.max_new_tokens, "Generation length limit")->check(CLI::PositiveNumber);
    app->add_option("--num-beams", options.num_beams, "Beam count")->check(CLI::PositiveNumber);
    app->add_option("--do-sample", options.do_sample, "Sample instead of beam search");
    app->add_option("--top-k", top_k, "Sampling top-k");
    app->add_option("--top-p", top_p, "Sampling top-p")->check(CLI::Range(0.0, 1.0));
    app->add_option("--workers", options.workers, "Worker threads")->check(CLI::Range(1, 1024));
    extractor.add_to(*app, true);
    backend.add_to(*app, true);
    app->callback([this] { exit_code = run(); });
  }

  int run() {
    std::unique_ptr<gk::StopwordSet> stop;
    options.extractor = extractor.build(stop);
    options.seed = extractor.seed;
    options.top_k = top_k;
    options.top_p = top_p;
    options.relabel_mode = conservative ? gk::RelabelMode::kConservative : gk::RelabelMode::kDefault;
    if (options.mixup_k == 1) throw UsageError("--mixup-k must be 0 or at least 2");
    if (options.mixup_k > 0 && task != "clf") throw UsageError("--mixup-k applies to clf only");
    if (conservative && task != "ner") throw UsageError("--conservative applies to ner only");
    if (!gazetteer_file.empty() && task != "ner") throw UsageError("--gazetteer applies to ner only");

    auto backends = backend.build(options.mask_token);
    InputFile in(input);
    gk::RunReport report;
    if (task == "clf") {
      const auto records = gk::io::read_classification(in.get());
      auto result = gk::augment_classification_corpus(records, multiplier, options, *backends.generator,
                                                      *backends.embedder);
      OutputFile out(output);
      gk::io::write_classification(out.get(), result.records);
      out.finish();
      report = result.report;
    } else if (task == "ner") {
      const auto sequences = gk::io::read_conll(in.get());
      std::vector<gk::NerSequence> gaz_source = sequences;
      if (!gazetteer_file.empty()) {
        InputFile g(gazetteer_file);
        for (auto& s : gk::io::read_conll(g.get())) gaz_source.push_back(std::move(s));
      }
      const auto gazetteer = gk::Gazetteer::build(gaz_source);
      const auto passages = gk::concat_sequences(sequences, passage_words);
      auto result = gk::augment_ner(passages, gazetteer, multiplier, options, *backends.generator, *backends.embedder);
      OutputFile out(output);
      gk::io::write_conll(out.get(), result.sequences);
      out.finish();
      report = result.report;
    } else {
      const auto examples = gk::io::read_mrc(in.get());
      auto result = gk::augment_mrc_corpus(examples, multiplier, options, *backends.generator, *backends.embedder);
      OutputFile out(output);
      gk::io::write_mrc(out.get(), result.examples);
      out.finish();
      report = result.report;
    }

    const std::string summary = report.to_json().dump();
    if (!report_path.empty()) {
      OutputFile r(report_path);
      r.get() << report.to_json().dump(2) << '\n';
      r.finish();
    }
    std::cerr << summary << '\n';
    return report.failed == 0 ? 0 : kExitFailures;
  }

  int exit_code = 0;
};

// ---- finetune-pairs ----------------------------------------------------------------

struct FinetunePairsCommand {
  std::string input;
  std::string output = "-";
  gk::AugmentOptions options;
  ExtractorFlags extractor;
  BackendFlags backend;

  void add_to(CLI::App& parent) {
    auto* app = parent.add_subcommand("finetune-pairs", "Label-aware <sketch, text> pairs for fine-tuning");
    app->add_option("-i,--input", input, "Classification JSON Lines")->required()->check(CLI::ExistingFile);
    app->add_option("-o,--output", output, "Pairs as JSON Lines, '-' for stdout");
    app->add_option("--attribute-control", options.attribute_control, "Prepend the label prompt to the sketch")
        ->default_str("true");
    app->add_option("--separator", options.separator, "Text between label and sketch");
    app->add_option("--mask-token", options.mask_token, "Mask token");
    app->add_option("--workers", options.workers, "Worker threads")->check(CLI::Range(1, 1024));
    extractor.add_to(*app, true);
    backend.add_to(*app, false);
    app->callback([this] { exit_code = run(); });
  }

  int run() {
    std::unique_ptr<gk::StopwordSet> stop;
    options.extractor = extractor.build(stop);
    options.seed = extractor.seed;
    auto backends = backend.build(options.mask_token);
    InputFile in(input);
    const auto records = gk::io::read_classification(in.get());
    const auto pairs = gk::build_finetune_pairs(records, options, *backends.embedder);
    OutputFile out(output);
    gk::io::write_pairs(out.get(), pairs);
    out.finish();
    return 0;
  }

  int exit_code = 0;
};

// ---- evaluate ------------------------------------------------------------------------

struct EvaluateCommand {
  std::string input = "-";
  std::string output = "-";
  std::string mask_token = std::string(gk::kDefaultMaskToken);
  int workers = 1;

  void add_to(CLI::App& parent) {
    auto* app = parent.add_subcommand("evaluate", "Model-free generation metrics");
    app->add_option("input", input, "JSON Lines with original, sketch and generated fields, '-' for stdin");
    app->add_option("-o,--output", output, "Report JSON, '-' for stdout");
    app->add_option("--mask-token", mask_token, "Mask token used in the sketches");
    app->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 1024));
    app->callback([this] { exit_code = run(); });
  }

  int run() {
    InputFile in(input);
    const auto records = gk::io::read_eval_records(in.get());
    if (records.empty()) throw gk::InvalidArgument("no evaluation records in " + input);
    const auto report = gk::metrics::evaluate_corpus(records, mask_token, workers);
    OutputFile out(output);
    out.get() << report.to_json().dump(2) << '\n';
    out.finish();
    return 0;
  }

  int exit_code = 0;
};

// ---- stub-server -------------------------------------------------------------------------

struct StubServerCommand {
  gk::StubServer::Options options;

  void add_to(CLI::App& parent) {
    auto* app = parent.add_subcommand("stub-server", "Serve the stub generation and embedding protocol");
    app->add_option("--host", options.host, "Bind address");
    app->add_option("--port", options.port, "Port, 0 for any free port")->check(CLI::Range(0, 65535));
    app->add_option("--filler", options.filler, "Text substituted for each mask");
    app->add_option("--mask-token", options.mask_token, "Mask token");
    app->add_option("--dim", options.dim, "Embedding dimension")->check(CLI::Range(8, 65536));
    app->callback([this] { exit_code = run(); });
  }

  int run() {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);  // inherited by the server thread
    gk::StubServer server(options);
    server.start();
    std::cout << server.url() << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
    return 0;
  }

  int exit_code = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-based text generation toolkit"};
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1);

  SketchCommand sketch;
  BuildDatasetCommand build;
  AugmentCommand augment;
  FinetunePairsCommand finetune;
  EvaluateCommand evaluate;
  StubServerCommand stub;
  sketch.add_to(app);
  build.add_to(app);
  augment.add_to(app);
  finetune.add_to(app);
  evaluate.add_to(app);
  stub.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const gk::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailures;
  }
  for (int code : {sketch.exit_code, build.exit_code, augment.exit_code, finetune.exit_code, evaluate.exit_code,
                   stub.exit_code}) {
    if (code != 0) return code;
  }
  return 0;
}
