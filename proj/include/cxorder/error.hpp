#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cxorder {

enum class ErrorCode {
  dimension_mismatch,
  not_symmetric,
  not_psd,
  not_orthogonal,
  eigen_no_convergence,
  corr_residual_exceeded,
  singular_input,
  certification_failed,
  singular_iterate,
  rank_ambiguous,
  empty_measure,
  invalid_measure,
  zero_row,
  budget_exceeded,
  gap_not_reached,
  lp_infeasible,
  non_finite,
};

std::string_view error_code_name(ErrorCode code);

/// Library failure. `residual` carries the diagnostic norm that tripped the
/// check when one exists (NaN otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        double residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code),
        residual_(residual) {}

  ErrorCode code() const noexcept { return code_; }
  double residual() const noexcept { return residual_; }

 private:
  ErrorCode code_;
  double residual_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::not_symmetric: return "not_symmetric";
    case ErrorCode::not_psd: return "not_psd";
    case ErrorCode::not_orthogonal: return "not_orthogonal";
    case ErrorCode::eigen_no_convergence: return "eigen_no_convergence";
    case ErrorCode::corr_residual_exceeded: return "corr_residual_exceeded";
    case ErrorCode::singular_input: return "singular_input";
    case ErrorCode::certification_failed: return "certification_failed";
    case ErrorCode::singular_iterate: return "singular_iterate";
    case ErrorCode::rank_ambiguous: return "rank_ambiguous";
    case ErrorCode::empty_measure: return "empty_measure";
    case ErrorCode::invalid_measure: return "invalid_measure";
    case ErrorCode::zero_row: return "zero_row";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::gap_not_reached: return "gap_not_reached";
    case ErrorCode::lp_infeasible: return "lp_infeasible";
    case ErrorCode::non_finite: return "non_finite";
  }
  return "unknown";
}

}  // namespace cxorder
