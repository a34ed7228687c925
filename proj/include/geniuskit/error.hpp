#pragma once

#include <stdexcept>
#include <string>

namespace geniuskit {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two embeddings with different dimensions met; the embedder is misconfigured.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : Error("embedding dimension mismatch: " + std::to_string(lhs) + " vs " +
              std::to_string(rhs)) {}
};

/// A backend could not be reached after all retry attempts.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// A backend answered, but the answer does not follow the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Input data (a file line, a record) could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace geniuskit
