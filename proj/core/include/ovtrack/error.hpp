#pragma once

#include <stdexcept>
#include <string>

namespace ovtrack {

// Raised when an input file cannot be parsed (CLI exit code 2).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when inputs parse but violate a contract, e.g. a dimension
// mismatch or an unknown category id (CLI exit code 3).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ovtrack
