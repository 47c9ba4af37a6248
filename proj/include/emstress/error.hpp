#pragma once

#include <stdexcept>
#include <string>

namespace emstress {

// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorKind {
  validation,
  solver,
  io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline Error validation_error(const std::string& what) {
  return Error(ErrorKind::validation, what);
}

inline Error solver_error(const std::string& what) {
  return Error(ErrorKind::solver, what);
}

inline Error io_error(const std::string& what) {
  return Error(ErrorKind::io, what);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::solver: return "solver";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace emstress
