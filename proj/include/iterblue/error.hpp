#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iterblue {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (e.g. inner dimensions of a product).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numeric contract was violated: non-finite input, asymmetric matrix
/// where symmetry is required, indefinite matrix passed as (semi)definite,
/// or a type invariant broken at construction.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A factorization found the matrix (numerically) rank deficient.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Config text could not be parsed; carries the offending key and line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::string key)
      : Error("line " + std::to_string(line) + ": " + message),
        line_(line),
        key_(std::move(key)) {}

  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Reading or writing a stream/file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iterblue
