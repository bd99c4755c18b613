#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcs {

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  graph_disconnected,
  insufficient_sample,
  assumption_violated,
  unsupported_shape,
  degenerate_spectrum,
  no_applicable_pairs,
  precondition_violated,
  numerical_failure,
  io_error,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-status mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace mcs
