#pragma once

#include <stdexcept>
#include <string>

namespace koopflow {

enum class ErrorCode {
  InvalidArgument,  // bad input to an operation (dimension mismatch, invariant violation)
  Config,           // bad run configuration or config file
  Simulation,       // simulator failure (linear solve, CFL logic)
  Fit,              // identification failure
  Io,               // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw_invalid(msg);
}

inline void require(bool cond, const std::string& msg, ErrorCode code) {
  if (!cond) throw Error(code, msg);
}

}  // namespace koopflow
