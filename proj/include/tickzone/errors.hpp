#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tickzone {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model or configuration parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Formula evaluated outside the domain where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Not enough observations for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Tape without alternations: the tick-size estimator is undefined.
class DegenerateTapeError : public Error {
 public:
  using Error::Error;
};

class CollinearityError : public Error {
 public:
  using Error::Error;
};

// Some rows lack the quotes a statistic needs.
class PartialDataError : public Error {
 public:
  PartialDataError(const std::string& what, std::vector<std::size_t> rows)
      : Error(what), rows_(std::move(rows)) {}

  [[nodiscard]] const std::vector<std::size_t>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::size_t> rows_;
};

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NoInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace tickzone
