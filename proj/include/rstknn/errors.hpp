#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rstknn {

class DatasetTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyDataset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonPositiveInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotInternalNode : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed dataset/query input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rstknn
