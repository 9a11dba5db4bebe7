#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

/// Failure categories. The CLI maps them onto its exit codes.
enum class ErrorKind {
  InvalidInput,   // malformed or out-of-domain arguments
  SolverFailure,  // bracket expansion or convergence failure
  CapExceeded,    // enumeration larger than the configured cap
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidInput, what);
}

}  // namespace spectra
