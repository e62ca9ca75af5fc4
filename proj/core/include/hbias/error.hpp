#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hbias {

// Raised for any invalid input or violated precondition in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text that failed to parse. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hbias
