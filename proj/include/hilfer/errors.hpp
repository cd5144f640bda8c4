#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hilfer {

/// Root of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (bad interval, non-node, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gamma evaluated at (or within 1e-12 of) a non-positive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Result not representable as a finite double.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Expression source rejected by the parser; carries the byte offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected)
      : Error("parse error at offset " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Domain violation while evaluating an expression (log of a negative, x/0, ...).
class EvalError : public Error {
 public:
  EvalError(std::size_t offset, const std::string& what)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// The nondegeneracy condition c + d != A fails.
class SingularProblemError : public Error {
 public:
  using Error::Error;
};

/// Lebesgue/Hoelder exponent violates a positivity condition.
class InadmissibleExponentError : public Error {
 public:
  using Error::Error;
};

/// Problem document is structurally invalid; carries the offending key path.
class SchemaError : public Error {
 public:
  SchemaError(std::string key_path, const std::string& what)
      : Error("schema error at '" + key_path + "': " + what), key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A solution table does not live on the problem's mesh.
class MeshMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace hilfer
