#pragma once
#include <stdexcept>
#include <string>

namespace fracac {

enum class ErrorKind {
  domain,       // argument outside the mathematical domain
  config,       // inconsistent or degenerate configuration
  shape,        // array length mismatch
  blowup,       // non-finite or exploding state
  convergence,  // stationarity / collapse not reached in time
  singular,     // coincident centers, singular system
  io,
  window,       // measurement window invalid (interface lost early)
  internal,
};

const char* kind_name(ErrorKind k) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by time steppers; carries the offending step.
class BlowupError : public Error {
 public:
  BlowupError(long step, double time, const std::string& what)
      : Error(ErrorKind::blowup, what), step_(step), time_(time) {}
  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline void require(bool cond, ErrorKind k, const std::string& msg) {
  if (!cond) fail(k, msg);
}

}  // namespace fracac
