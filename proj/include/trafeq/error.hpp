#pragma once

#include <stdexcept>
#include <string>

namespace trafeq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based, 0 when the problem is not tied
/// to a particular line (e.g. a count mismatch detected at end of file).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : Error(format(source, line, what)), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& source, int line,
                            const std::string& what) {
    std::string out = source.empty() ? std::string("<input>") : source;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  int line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A positive-demand origin/destination pair has no admissible route.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

/// Root finder or line search exceeded its iteration cap.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace trafeq
