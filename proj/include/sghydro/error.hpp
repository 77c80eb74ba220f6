#pragma once

#include <stdexcept>
#include <string>

namespace sghydro {

/// Failure categories. The numeric values double as CLI exit codes where
/// one applies (config 2, numerical 3, I/O 4).
enum class ErrorKind {
  InvalidArgument = 1,
  Config = 2,
  Numerical = 3,
  Io = 4,
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

}  // namespace sghydro
