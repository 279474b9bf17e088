#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamprop {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: unreadable files, malformed formats, invalid arguments.
/// The CLI maps this family to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `location` is a byte offset for binary formats and
/// a 1-based line number for text formats; `what()` names which.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t location)
      : InputError(message), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

/// A batch stream that violates the scaler's ordering contract.
class StreamError : public Error {
 public:
  using Error::Error;
};

}  // namespace streamprop
