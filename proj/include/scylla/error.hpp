#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scylla {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A syntax problem at a known location of a text input.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class CyclicHeadError : public ParseError {
 public:
  using ParseError::ParseError;
};

// One problem found while loading or validating a lexicon.
struct Diagnostic {
  enum class Kind { parse, dangling_reference, schema_violation, invariant };

  Kind kind = Kind::parse;
  std::string source;
  std::size_t line = 0;
  std::string message;
};

const char* to_string(Diagnostic::Kind kind);

class LexiconError : public Error {
 public:
  explicit LexiconError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  // Kind of the first diagnostic.
  Diagnostic::Kind kind() const { return diagnostics_.front().kind; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

class UnknownLuError : public Error {
 public:
  using Error::Error;
};

// Failure to reach a provider at all; safe to retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The provider answered with an error status. Never retried.
class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& message)
      : Error("provider error " + std::to_string(status) + ": " + message), status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

class UnsupportedLanguageError : public ProviderError {
 public:
  explicit UnsupportedLanguageError(const std::string& message) : ProviderError(400, message) {}
};

class MalformedResponseError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace scylla
