#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adoptrace {

// Base of every recoverable failure raised by the library. Contract
// violations (programming errors) use std::invalid_argument / std::out_of_range.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A single input line could not be parsed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A required field of a record is absent.
class MissingFieldError : public ParseError {
 public:
  MissingFieldError(std::size_t line, std::string field)
      : ParseError(line, "missing required field '" + field + "'"),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class CorpusQualityError : public Error {
 public:
  using Error::Error;
};

// Input that is syntactically fine but semantically unusable
// (empty lexicon, empty term index, insufficient class population...).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace adoptrace
