#pragma once

#include <stdexcept>
#include <string>

namespace moyal {

/// Base class for every error raised by the library. `exit_code()` maps the
/// error onto the CLI's exit-code policy (64 usage, 65 data, 2 anomaly).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 65; }
};

/// A caller violated a documented precondition (bad sizes, bad indices).
class PreconditionError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 64; }
};

/// A state or operation needs more Fock levels than the truncation provides.
class LeakageError : public Error {
 public:
  using Error::Error;
};

class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant failed (certificate above seminorm 1, negative
/// spectrum below tolerance, ...).
class AnomalyError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 64; }
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace moyal
