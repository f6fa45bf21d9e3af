#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stratinf {

// Bad argument supplied by the caller (invalid node id, empty seed set, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed edge-list text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An exponential-cost computation was refused because the instance is too large.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relative variance against a baseline with zero variance.
class UndefinedRatioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace stratinf
