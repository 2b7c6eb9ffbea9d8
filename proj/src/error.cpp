#include "orthoproj/error.hpp"

namespace orthoproj {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate_data: return "degenerate_data";
    case ErrorCode::coincident_points: return "coincident_points";
    case ErrorCode::unsupported_ambient_dimension: return "unsupported_ambient_dimension";
    case ErrorCode::undefined_fit: return "undefined_fit";
    case ErrorCode::band_empty: return "band_empty";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::missing_shape: return "missing_shape";
    case ErrorCode::missing_adjoint: return "missing_adjoint";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace orthoproj
