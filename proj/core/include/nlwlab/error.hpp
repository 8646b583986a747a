#pragma once

#include <stdexcept>
#include <string>

namespace nlwlab {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  domain,
  symmetry_violation,
  undefined_ratio,
  blowup,
  diverged,
  degenerate_samples,
  insufficient_samples,
  io,
  config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by the evolvers when a field value or norm leaves the finite range.
class BlowupError : public Error {
 public:
  BlowupError(double last_good_time, const std::string& what)
      : Error(ErrorCode::blowup, what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace nlwlab
