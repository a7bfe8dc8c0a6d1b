#include "gsd/error.hpp"

namespace gsd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::insufficient_data: return "insufficient data";
    case ErrorCode::degenerate_data: return "degenerate data";
    case ErrorCode::insufficient_class_data: return "insufficient class data";
    case ErrorCode::untrainable_dataset: return "untrainable dataset";
    case ErrorCode::insufficient_batch: return "insufficient batch";
    case ErrorCode::schema_mismatch: return "schema mismatch";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::unsupported_version: return "unsupported version";
    case ErrorCode::missing_label_column: return "missing label column";
    case ErrorCode::non_binary_label: return "non-binary label";
    case ErrorCode::io_error: return "i/o error";
  }
  return "unknown error";
}

}  // namespace gsd
