#include "gammaprime/error.hpp"

namespace gammaprime {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::DegenerateTable: return "degenerate table";
    case ErrorCode::AlreadyCorrected: return "table already corrected";
    case ErrorCode::OutOfRange: return "outside the monotone range";
    case ErrorCode::Bracket: return "invalid root bracket";
    case ErrorCode::Convergence: return "no convergence";
    case ErrorCode::Underflow: return "numerical underflow";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gammaprime
