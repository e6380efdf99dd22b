#pragma once

#include <stdexcept>
#include <string>

namespace socialvec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be opened / written.
struct IoError : Error {
  using Error::Error;
};

// Malformed input data; message carries file path and 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

// Contract violation by the caller (empty context, bad dimensions, ...).
struct InvalidArgumentError : Error {
  using Error::Error;
};

// Model / classifier file problems, one type per failure kind.
struct ModelFormatError : Error {
  using Error::Error;
};
struct VersionMismatchError : ModelFormatError {
  using ModelFormatError::ModelFormatError;
};
struct TruncatedModelError : ModelFormatError {
  using ModelFormatError::ModelFormatError;
};
struct DimensionMismatchError : ModelFormatError {
  using ModelFormatError::ModelFormatError;
};

// Non-finite values or other fatal conditions during optimization.
struct TrainError : Error {
  using Error::Error;
};

}  // namespace socialvec
