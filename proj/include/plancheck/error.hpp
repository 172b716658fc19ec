#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plancheck {

/// 1-based line/column plus the byte offset into the source text.
struct SourcePos {
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos);

  const SourcePos& pos() const noexcept { return pos_; }
  /// Message without the "line:col:" prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  SourcePos pos_;
  std::string detail_;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class NondeterminismError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ExtractError : public Error {
 public:
  using Error::Error;
};

/// Transport, authentication, or timeout failure talking to a completion provider.
class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace plancheck
