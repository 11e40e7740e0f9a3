#pragma once

#include <stdexcept>
#include <string>

namespace paramfold {

// Failure categories. They line up with the CLI exit codes and the C API
// status values: input problems, violated mathematical hypotheses, and
// numerical breakdowns are reported separately.
enum class ErrorKind {
  Argument,    // misuse of the API (mismatched degrees, bad ranges)
  Input,       // malformed map or parameterization files
  Hypothesis,  // the map does not satisfy what the construction needs
  Numeric,     // iteration failed to converge, left its domain, ...
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace paramfold
