#include "geniuskit/svc_clients.hpp"

#include <cmath>
#include <random>

#include "geniuskit/error.hpp"
#include "geniuskit/unicode.hpp"
#include "httplib.h"

namespace geniuskit {

using nlohmann::json;

void GenerationRequest::validate() const {
  if (n < 1) throw InvalidArgument("generation request needs n >= 1");
  if (max_new_tokens < 1) throw InvalidArgument("generation request needs max_new_tokens >= 1");
  if (num_beams < 1) throw InvalidArgument("generation request needs num_beams >= 1");
  if (sketch_text.empty()) throw InvalidArgument("generation request needs a non-empty sketch");
  if (top_k && *top_k < 1) throw InvalidArgument("top_k must be >= 1");
  if (top_p && !(*top_p > 0.0 && *top_p <= 1.0)) throw InvalidArgument("top_p must lie in (0, 1]");
}

json to_wire(const GenerationRequest& request) {
  json body;
  body["sketch"] = request.sketch_text;
  body["prompt"] = request.prompt ? json(*request.prompt) : json(nullptr);
  body["n"] = request.n;
  body["max_new_tokens"] = request.max_new_tokens;
  body["num_beams"] = request.num_beams;
  body["do_sample"] = request.do_sample;
  body["top_k"] = request.top_k ? json(*request.top_k) : json(nullptr);
  body["top_p"] = request.top_p ? json(*request.top_p) : json(nullptr);
  body["seed"] = request.seed ? json(*request.seed) : json(nullptr);
  return body;
}

GenerationRequest generation_request_from_wire(const json& body) {
  if (!body.is_object()) throw ProtocolError("generate body must be a JSON object");
  if (!body.contains("sketch") || !body["sketch"].is_string()) {
    throw ProtocolError("generate body needs a string \"sketch\"");
  }
  auto present = [&](const char* key) { return body.contains(key) && !body[key].is_null(); };
  GenerationRequest r;
  try {
    r.sketch_text = body["sketch"].get<std::string>();
    if (present("prompt")) r.prompt = body["prompt"].get<std::string>();
    if (present("n")) r.n = body["n"].get<int>();
    if (present("max_new_tokens")) r.max_new_tokens = body["max_new_tokens"].get<int>();
    if (present("num_beams")) r.num_beams = body["num_beams"].get<int>();
    if (present("do_sample")) r.do_sample = body["do_sample"].get<bool>();
    if (present("top_k")) r.top_k = body["top_k"].get<int>();
    if (present("top_p")) r.top_p = body["top_p"].get<double>();
    if (present("seed")) r.seed = body["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("generate body: ") + e.what());
  }
  try {
    r.validate();
  } catch (const InvalidArgument& e) {
    throw ProtocolError(e.what());
  }
  return r;
}

GenerationResponse generate(const GenerationRequest& request, Generator& backend) {
  request.validate();
  auto response = backend.generate(request);
  if (response.texts.size() != static_cast<std::size_t>(request.n)) {
    throw ProtocolError("backend returned " + std::to_string(response.texts.size()) +
                        " texts, expected " + std::to_string(request.n));
  }
  return response;
}

std::vector<Embedding> embed(std::span<const std::string> texts, Embedder& backend) {
  if (texts.empty()) throw InvalidArgument("embed needs at least one text");
  auto vectors = backend.embed(texts);
  if (vectors.size() != texts.size()) {
    throw ProtocolError("backend returned " + std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
  }
  const std::size_t dim = vectors.front().size();
  if (dim == 0) throw ProtocolError("backend returned zero-dimensional vectors");
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ProtocolError("backend returned vectors of mixed dimension");
    for (double x : v) {
      if (!std::isfinite(x)) throw ProtocolError("backend returned a non-finite vector component");
    }
  }
  return vectors;
}

std::string stub_generate(std::string_view sketch, std::string_view filler, std::string_view mask_token) {
  if (mask_token.empty()) return std::string(sketch);
  std::string out;
  out.reserve(sketch.size());
  std::size_t pos = 0;
  while (true) {
    const auto hit = sketch.find(mask_token, pos);
    if (hit == std::string_view::npos) break;
    out.append(sketch.substr(pos, hit - pos));
    out.append(filler);
    pos = hit + mask_token.size();
  }
  out.append(sketch.substr(pos));
  return out;
}

EchoStub::EchoStub(std::string filler, std::string mask_token)
    : filler_(std::move(filler)), mask_token_(std::move(mask_token)) {}

GenerationResponse EchoStub::generate(const GenerationRequest& request) {
  std::string text = stub_generate(request.sketch_text, filler_, mask_token_);
  if (request.prompt && !request.prompt->empty()) text = *request.prompt + " " + text;
  return {std::vector<std::string>(static_cast<std::size_t>(request.n), text), "echo-stub"};
}

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Embedding test_embed(std::string_view text, std::size_t dim) {
  if (dim < 8) throw InvalidArgument("test embedder needs dim >= 8");
  const std::string folded = unicode::fold_case(text);
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < folded.size(); i += unicode::decode(folded, i).len) starts.push_back(i);
  starts.push_back(folded.size());

  Embedding v(dim, 0.0);
  if (folded.empty()) return v;
  auto add = [&](std::string_view gram) {
    const std::uint64_t h = fnv1a(gram);
    v[h % dim] += (h >> 63) ? -1.0 : 1.0;
  };
  const std::size_t cps = starts.size() - 1;
  if (cps < 3) {
    add(folded);
  } else {
    for (std::size_t i = 0; i + 3 <= cps; ++i) {
      add(std::string_view(folded).substr(starts[i], starts[i + 3] - starts[i]));
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    // Signed collisions cancelled out; fall back to a single hashed coordinate.
    v[fnv1a(folded) % dim] = 1.0;
    return v;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
  if (dim < 8) throw InvalidArgument("test embedder needs dim >= 8");
}

std::vector<Embedding> HashEmbedder::embed(std::span<const std::string> texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(test_embed(t, dim_));
  return out;
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)),
      in_flight_(std::max<std::ptrdiff_t>(1, std::min<std::ptrdiff_t>(options_.max_in_flight, 1024))),
      client_tag_(std::random_device{}()) {
  if (options_.max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::next_request_id() {
  return std::to_string(client_tag_) + "-" + std::to_string(counter_.fetch_add(1));
}

json HttpBackend::post(const std::string& base_url, const std::string& path, const json& body,
                       const std::string& request_id) {
  if (base_url.empty()) throw InvalidArgument("no endpoint configured for " + path);
  const std::string payload = body.dump();
  const httplib::Headers headers{{"X-Request-Id", request_id}};
  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{in_flight_};

      httplib::Client client(base_url);
      client.set_connection_timeout(options_.timeout);
      client.set_read_timeout(options_.timeout);
      client.set_write_timeout(options_.timeout);
      auto res = client.Post(path, headers, payload, "application/json");
      if (!res) {
        last_error = "POST " + base_url + path + ": " + httplib::to_string(res.error());
      } else if (res->status == 200) {
        try {
          return json::parse(res->body);
        } catch (const json::exception& e) {
          throw ProtocolError("malformed JSON from " + path + ": " + e.what());
        }
      } else if (res->status >= 500 || res->status == 429) {
        last_error = "POST " + base_url + path + ": HTTP " + std::to_string(res->status);
      } else {
        throw ProtocolError("POST " + path + " rejected with HTTP " + std::to_string(res->status) +
                            ": " + res->body);
      }
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError(last_error, options_.max_attempts);
}

GenerationResponse HttpBackend::generate(const GenerationRequest& request) {
  request.validate();
  const std::string id = request.request_id.empty() ? next_request_id() : request.request_id;
  const json answer = post(options_.generate_url, "/v1/generate", to_wire(request), id);
  if (!answer.is_object() || !answer.contains("texts") || !answer["texts"].is_array()) {
    throw ProtocolError("generate response needs a \"texts\" array");
  }
  GenerationResponse response;
  response.backend_id = options_.generate_url;
  for (const auto& t : answer["texts"]) {
    if (!t.is_string()) throw ProtocolError("generate response texts must be strings");
    response.texts.push_back(t.get<std::string>());
  }
  return response;
}

std::vector<Embedding> HttpBackend::embed(std::span<const std::string> texts) {
  json body;
  body["texts"] = json::array();
  for (const auto& t : texts) body["texts"].push_back(t);
  const json answer = post(options_.embed_url, "/v1/embed", body, next_request_id());
  if (!answer.is_object() || !answer.contains("vectors") || !answer["vectors"].is_array() ||
      !answer.contains("dim") || !answer["dim"].is_number_integer()) {
    throw ProtocolError("embed response needs \"vectors\" and \"dim\"");
  }
  const auto dim = answer["dim"].get<std::size_t>();
  std::vector<Embedding> out;
  for (const auto& row : answer["vectors"]) {
    if (!row.is_array() || row.size() != dim) throw ProtocolError("embed vector does not match dim");
    Embedding v;
    v.reserve(dim);
    for (const auto& x : row) {
      if (!x.is_number()) throw ProtocolError("embed vector components must be numbers");
      v.push_back(x.get<double>());
    }
    out.push_back(std::move(v));
  }
  return out;
}

StubServer::StubServer(Options options) : options_(std::move(options)) {}

StubServer::~StubServer() { stop(); }

std::string StubServer::url() const { return "http://" + options_.host + ":" + std::to_string(port_); }

void StubServer::bind() {
  server_ = std::make_unique<httplib::Server>();
  auto error_body = [](httplib::Response& res, int status, const std::string& what) {
    res.status = status;
    res.set_content(json{{"error", what}}.dump(), "application/json");
  };

  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  server_->Post("/v1/generate", [this, error_body](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto request = generation_request_from_wire(json::parse(req.body));
      EchoStub stub(options_.filler, options_.mask_token);
      const auto response = stub.generate(request);
      res.set_content(json{{"texts", response.texts}}.dump(), "application/json");
    } catch (const json::exception& e) {
      error_body(res, 400, e.what());
    } catch (const Error& e) {
      error_body(res, 400, e.what());
    }
  });

  server_->Post("/v1/embed", [this, error_body](const httplib::Request& req, httplib::Response& res) {
    try {
      const json body = json::parse(req.body);
      if (!body.contains("texts") || !body["texts"].is_array() || body["texts"].empty()) {
        error_body(res, 400, "embed body needs a non-empty \"texts\" array");
        return;
      }
      const auto texts = body["texts"].get<std::vector<std::string>>();
      HashEmbedder embedder(options_.dim);
      json out;
      out["vectors"] = embedder.embed(texts);
      out["dim"] = options_.dim;
      res.set_content(out.dump(), "application/json");
    } catch (const json::exception& e) {
      error_body(res, 400, e.what());
    } catch (const Error& e) {
      error_body(res, 400, e.what());
    }
  });

  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else if (server_->bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw TransportError("cannot bind stub server on " + options_.host, 1);
}

int StubServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void StubServer::run() {
  bind();
  server_->listen_after_bind();
}

void StubServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace geniuskit
