#pragma once

#include <stdexcept>
#include <string>

namespace starlb {

// Raised for precondition violations on mathematical inputs (unknown
// variable, dimension mismatch, non-closed form, ...).
class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by parsers and validators; `pointer` is a JSON pointer into the
// offending document when one is available.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::string pointer = "")
      : std::runtime_error(pointer.empty() ? what : pointer + ": " + what),
        message_(what),
        pointer_(std::move(pointer)) {}

  const std::string& message() const { return message_; }
  const std::string& pointer() const { return pointer_; }

 private:
  std::string message_;
  std::string pointer_;
};

}  // namespace starlb
