#pragma once
// Error type shared by the library and the CLI. Each error carries a stable
// machine-readable code so the CLI can emit a structured envelope.

#include <stdexcept>
#include <string>

namespace lqot {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  not_symmetric,
  not_spd,
  singular_matrix,
  conjugate_time,
  no_convergence,
  io_error,
  schema_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

  static const char* code_name(ErrorCode c) {
    switch (c) {
      case ErrorCode::invalid_argument: return "invalid_argument";
      case ErrorCode::dimension_mismatch: return "dimension_mismatch";
      case ErrorCode::not_symmetric: return "not_symmetric";
      case ErrorCode::not_spd: return "not_spd";
      case ErrorCode::singular_matrix: return "singular_matrix";
      case ErrorCode::conjugate_time: return "conjugate_time";
      case ErrorCode::no_convergence: return "no_convergence";
      case ErrorCode::io_error: return "io_error";
      case ErrorCode::schema_error: return "schema_error";
    }
    return "unknown";
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lqot
