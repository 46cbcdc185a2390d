#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace clozegen {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A required input file is missing or unreadable/corrupt. Carries the
// offending file name.
class LoadError : public Error {
 public:
  LoadError(const std::string& file, const std::string& what)
      : Error(file + ": " + what), file_(file) {}
  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

// A data file declares a version this library does not support.
class VersionError : public Error {
 public:
  VersionError(const std::string& file, const std::string& found)
      : Error(file + ": unsupported version " + found), found_(found) {}
  const std::string& found() const { return found_; }

 private:
  std::string found_;
};

// Malformed content at a specific line of a text file.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, long line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Content parsed but violates a declared expectation; lists offending lines.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<long> lines)
      : Error(what), lines_(std::move(lines)) {}
  const std::vector<long>& lines() const { return lines_; }

 private:
  std::vector<long> lines_;
};

// A reference (synset, id) that cannot be resolved.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Invalid argument at a module boundary.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Numeric failure (zero-norm vector, non-finite value).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A learned-model backend failed; retryable says whether the caller may try
// again (timeouts yes, malformed responses no).
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

}  // namespace clozegen
