// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mmwpl {

// Root of every error raised by the library. The CLI maps these to exit
// code 1; usage errors are raised by the CLI itself.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration file, or a semantically incomplete one.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A value violating a configured bound.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFrequencyError : public Error {
 public:
  explicit UnsupportedFrequencyError(double freq_ghz)
      : Error("unsupported frequency " + std::to_string(freq_ghz) + " GHz"),
        freq_(freq_ghz) {}
  double frequency() const noexcept { return freq_; }

 private:
  double freq_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t row = 0)
      : Error(row > 0 ? "row " + std::to_string(row) + ": " + msg : msg), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Normal equations are rank deficient and no penalty was requested.
class SingularFitError : public Error {
 public:
  explicit SingularFitError(const std::string& what)
      : Error(what + " (design matrix is rank deficient; consider Ridge)") {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, int iterations, double last_change)
      : Error(msg + " after " + std::to_string(iterations) +
              " iterations (last change " + std::to_string(last_change) + ")"),
        iterations_(iterations),
        last_change_(last_change) {}
  int iterations() const noexcept { return iterations_; }
  double last_change() const noexcept { return last_change_; }

 private:
  int iterations_;
  double last_change_;
};

}  // namespace mmwpl
