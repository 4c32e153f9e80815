#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

enum class ErrorCode {
  invalid_argument,
  precondition,
  truncation,
  convergence,
  positivity,
  overflow,
  normalization,
  io,
  config,
  internal,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// C boundary can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::precondition, what);
}

}  // namespace conelab
