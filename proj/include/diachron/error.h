#pragma once

#include <stdexcept>
#include <string>

namespace diachron {

// Malformed or missing input data (files, vocabularies, periods).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &what) : std::runtime_error(what) {}
};

// A numerical routine cannot produce a meaningful result.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string &what) : std::runtime_error(what) {}
};

// Text file with a line-oriented grammar did not parse.
class FormatError : public DataError {
 public:
  FormatError(const std::string &path, size_t line, const std::string &what)
      : DataError(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace diachron
