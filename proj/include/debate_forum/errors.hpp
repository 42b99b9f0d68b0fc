#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace debate_forum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: bad counts, labels, missing backend settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV input. `row()` is the 1-based physical line where the
// offending record starts (the header is line 1).
class CsvParseError : public Error {
 public:
  CsvParseError(std::size_t row, const std::string& what)
      : Error("CSV parse error at line " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class SampleError : public Error {
 public:
  enum class Kind { NoDistractors };
  SampleError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class RenderError : public Error {
 public:
  RenderError(std::string placeholder, const std::string& what)
      : Error(what), placeholder_(std::move(placeholder)) {}
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

class ParseError : public Error {
 public:
  enum class Kind { NoChoice };
  explicit ParseError(Kind kind) : Error("reply contains no option choice"), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class BackendError : public Error {
 public:
  enum class Kind { Unavailable, Rejected };
  BackendError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

// Corrupt or truncated transcript file; `line()` is 1-based.
class TranscriptError : public Error {
 public:
  TranscriptError(std::size_t line, const std::string& what)
      : Error("transcript line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace debate_forum
