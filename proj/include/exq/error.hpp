#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace exq {

enum class ErrorCode {
  ok = 0,

  // object validation
  not_hermitian,
  trace_not_one,
  not_positive,
  dimension_mismatch,
  length_mismatch,
  not_orthonormal,
  bad_weights,
  shape_mismatch,
  system_mismatch,
  numeric_range,
  check_failed,

  // sampling and inference
  unsupported_grid,
  bad_spec,
  unknown_measurement,
  bad_permutation,
  all_weights_zero,
  model_mismatch,

  // configuration and I/O
  schema_violation,
  io_error,

  internal,
};

const char* error_code_name(ErrorCode code);

// Exit code contract: 2 = schema/config, 3 = numerical validation,
// 4 = inference failure.
int cli_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(ErrorCode code, std::string message, double magnitude)
      : std::runtime_error(std::move(message)), code_(code), magnitude_(magnitude) {}
  Error(ErrorCode code, std::string message, std::string json_pointer)
      : std::runtime_error(std::move(message)),
        code_(code),
        pointer_(std::move(json_pointer)) {}

  ErrorCode code() const { return code_; }
  // Measured size of the violated invariant, NaN when not applicable.
  double magnitude() const { return magnitude_; }
  // JSON pointer into the offending config, empty otherwise.
  const std::string& pointer() const { return pointer_; }

 private:
  ErrorCode code_;
  double magnitude_ = std::nan("");
  std::string pointer_;
};

} // namespace exq
