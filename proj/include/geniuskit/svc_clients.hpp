#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

namespace httplib {
class Server;
}

namespace geniuskit {

using Embedding = std::vector<double>;

inline constexpr std::string_view kDefaultMaskToken = "<mask>";

struct GenerationRequest {
  std::string sketch_text;
  std::optional<std::string> prompt;  // already joined with its separator, e.g. "Sports:"
  int n = 1;
  int max_new_tokens = 200;
  int num_beams = 4;
  bool do_sample = true;
  std::optional<int> top_k;
  std::optional<double> top_p;
  std::optional<std::uint64_t> seed;
  std::string request_id;  // travels as the X-Request-Id header, not in the body

  void validate() const;
};

struct GenerationResponse {
  std::vector<std::string> texts;
  std::string backend_id;
};

nlohmann::json to_wire(const GenerationRequest& request);
GenerationRequest generation_request_from_wire(const nlohmann::json& body);

/// Fill-in generator backend. Implementations must be safe to call concurrently.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
};

/// Text embedding backend. Implementations must be safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) = 0;
};

/// Validated entry points: every response is checked against the protocol
/// invariants (n texts; one vector per text; a shared non-zero dimension).
GenerationResponse generate(const GenerationRequest& request, Generator& backend);
std::vector<Embedding> embed(std::span<const std::string> texts, Embedder& backend);

/// Replaces every mask token in `sketch` with `filler`; everything else is kept verbatim.
std::string stub_generate(std::string_view sketch, std::string_view filler,
                          std::string_view mask_token = kDefaultMaskToken);

/// Deterministic generator used in tests: echoes the prompt, then the sketch
/// with each mask replaced by a fixed filler. Returns n identical texts.
class EchoStub final : public Generator {
 public:
  explicit EchoStub(std::string filler = "filler", std::string mask_token = std::string(kDefaultMaskToken));
  GenerationResponse generate(const GenerationRequest& request) override;

 private:
  std::string filler_;
  std::string mask_token_;
};

/// L2-normalized signed feature hashing of the lowercased text's character
/// trigrams. Deterministic across runs and platforms.
Embedding test_embed(std::string_view text, std::size_t dim);

class HashEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;
  explicit HashEmbedder(std::size_t dim = kDefaultDim);
  std::vector<Embedding> embed(std::span<const std::string> texts) override;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
};

struct HttpBackendOptions {
  std::string generate_url;  // base URL, e.g. http://127.0.0.1:8080
  std::string embed_url;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::ptrdiff_t max_in_flight = 8;
  std::chrono::seconds timeout{120};
};

/// Client for the /v1/generate and /v1/embed HTTP+JSON protocol.
///
/// Transport failures and 5xx/429 answers are retried with exponential
/// backoff; other errors and malformed bodies raise ProtocolError at once.
class HttpBackend final : public Generator, public Embedder {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  GenerationResponse generate(const GenerationRequest& request) override;
  std::vector<Embedding> embed(std::span<const std::string> texts) override;

 private:
  nlohmann::json post(const std::string& base_url, const std::string& path,
                      const nlohmann::json& body, const std::string& request_id);
  std::string next_request_id();

  HttpBackendOptions options_;
  std::counting_semaphore<1024> in_flight_;
  std::atomic<std::uint64_t> counter_{0};
  std::uint64_t client_tag_;
};

/// In-process HTTP server speaking the generation/embedding protocol with the
/// EchoStub and HashEmbedder behind it. Also answers GET /healthz.
class StubServer {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks a free port
    std::string filler = "filler";
    std::string mask_token = std::string(kDefaultMaskToken);
    std::size_t dim = HashEmbedder::kDefaultDim;
  };

  explicit StubServer(Options options);
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const { return port_; }
  std::string url() const;

 private:
  void bind();

  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace geniuskit
