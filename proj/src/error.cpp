#include "conelab/error.hpp"

namespace conelab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::positivity: return "positivity";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::io: return "io";
    case ErrorCode::config: return "config";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace conelab
