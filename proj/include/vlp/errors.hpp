#pragma once

#include <stdexcept>
#include <string>

namespace vlp {

// Base for everything the engine throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Both modalities absent: nothing to classify.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// An L2V/V2L backend returned zero frames / empty text.
class SynthesisEmptyError : public Error {
 public:
  using Error::Error;
};

// Wraps a failed backend call; carries the canonical digest of the
// request that failed so transcripts and logs can point at it.
class BackendError : public Error {
 public:
  BackendError(const std::string& msg, std::string request_digest, std::string kind)
      : Error(msg + " [kind=" + kind + " request=" + request_digest + "]"),
        request_digest_(std::move(request_digest)),
        kind_(std::move(kind)) {}
  explicit BackendError(const std::string& msg) : Error(msg) {}

  const std::string& request_digest() const { return request_digest_; }
  const std::string& request_kind() const { return kind_; }

 private:
  std::string request_digest_;
  std::string kind_;
};

// Network-level failure (connect, timeout, retryable HTTP status).
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

// The server answered but the body does not match the wire contract.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

// The scripted mock has no rule for a request. Always fatal so golden
// tests cannot silently drift onto a default response.
class ScriptMissError : public BackendError {
 public:
  using BackendError::BackendError;
};

// frame_score response had neither token scores nor parseable text.
class UnscorableError : public Error {
 public:
  using Error::Error;
};

// Video generator returned a different number of frames than requested.
class CountMismatchError : public Error {
 public:
  using Error::Error;
};

// Could not extract the required number of plan steps.
class ParseFailureError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset record; carries the 1-based line number.
class SchemaViolationError : public Error {
 public:
  SchemaViolationError(int line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class CorpusTooSmallError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vlp
