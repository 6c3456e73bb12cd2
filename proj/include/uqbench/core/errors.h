#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace uqbench {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied parameter is outside its declared valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed (non-finite values, length mismatches, bad files).
class DataError : public Error {
 public:
  using Error::Error;
};

// Network-level failure talking to a backend. Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The backend cannot perform the requested operation (e.g. no sequence
// scoring for PMI).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// LLM output violated the closed JSON schema of a rewrite prompt.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string last_response)
      : Error(what), last_response_(std::move(last_response)) {}
  const std::string& last_response() const { return last_response_; }

 private:
  std::string last_response_;
};

// All rewrite attempts failed validation.
class RewriteFailedError : public Error {
 public:
  RewriteFailedError(const std::string& what, std::string last_response)
      : Error(what), last_response_(std::move(last_response)) {}
  const std::string& last_response() const { return last_response_; }

 private:
  std::string last_response_;
};

// PTrue elicitation produced neither "True" nor "False".
class ElicitationError : public Error {
 public:
  using Error::Error;
};

// CLEVR generation stalled before every per-type quota was reached.
class GenerationIncompleteError : public Error {
 public:
  GenerationIncompleteError(const std::string& what,
                            std::map<std::string, int> deficits)
      : Error(what), deficits_(std::move(deficits)) {}
  const std::map<std::string, int>& deficits() const { return deficits_; }

 private:
  std::map<std::string, int> deficits_;
};

}  // namespace uqbench
