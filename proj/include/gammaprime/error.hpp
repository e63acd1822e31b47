#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gammaprime {

enum class ErrorCode {
  Domain = 1,
  DegenerateTable,
  AlreadyCorrected,
  OutOfRange,
  Bracket,
  Convergence,
  Underflow,
  Parse,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the core library. The code maps one-to-one onto
/// the status values of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

/// Receives non-fatal diagnostics (e.g. an effect outside the range where
/// gamma prime is monotone). An empty handler drops them.
using WarningHandler = std::function<void(std::string_view)>;

}  // namespace gammaprime
