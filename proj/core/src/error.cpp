#include "mcslab/error.hpp"

namespace mcs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::graph_disconnected: return "graph-disconnected";
    case ErrorCode::insufficient_sample: return "insufficient-sample";
    case ErrorCode::assumption_violated: return "assumption-violated";
    case ErrorCode::unsupported_shape: return "unsupported-shape";
    case ErrorCode::degenerate_spectrum: return "degenerate-spectrum";
    case ErrorCode::no_applicable_pairs: return "no-applicable-pairs";
    case ErrorCode::precondition_violated: return "precondition-violated";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace mcs
