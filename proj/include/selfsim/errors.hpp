#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

/// Base class for all errors raised by the library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input or violated precondition.
class domain_error : public error {
 public:
  explicit domain_error(const std::string& what) : error(what) {}
};

/// A configurable resource budget was exhausted before an answer was
/// reached. Never stands in for a wrong answer.
class budget_error : public error {
 public:
  explicit budget_error(const std::string& what) : error(what) {}
};

/// Syntax error in a text format, with a 1-based line number.
class parse_error : public domain_error {
 public:
  parse_error(int line, const std::string& what)
      : domain_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace selfsim
