#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orthoproj {

enum class ErrorCode {
  invalid_dimension,
  dimension_mismatch,
  invalid_argument,
  degenerate_data,
  coincident_points,
  unsupported_ambient_dimension,
  undefined_fit,
  band_empty,
  parse_error,
  invariant_violation,
  missing_shape,
  missing_adjoint,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` is stable and
// is what the CLI emits in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace orthoproj
