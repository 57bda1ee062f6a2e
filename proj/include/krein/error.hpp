#pragma once

#include <stdexcept>
#include <string>

namespace krein {

// Typed failure reasons. Each solver/op documents which of these it can raise;
// everything else surfacing from Eigen is a programming error, not a KreinError.
enum class ErrorCode {
  dimension_mismatch,
  nonfinite_entry,
  invalid_params,
  mu_in_spectrum,
  not_dissipative,
  spectrum_touches_branch_cut,
  not_diagonalizable_or_ill_conditioned,
  gap_too_small,
  coordinate_degenerate,
  g_norm_too_large,
  no_convergence,
  contraction_violated,
  one_minus_kg_singular,
  residual_too_large,
  no_stabilization,
  spectrum_in_halfplane,
  alpha0_in_spectrum,
  overflow_at_large_t,
  io_error,
  parse_error,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::nonfinite_entry: return "nonfinite_entry";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::mu_in_spectrum: return "mu_in_spectrum";
    case ErrorCode::not_dissipative: return "not_dissipative";
    case ErrorCode::spectrum_touches_branch_cut: return "spectrum_touches_branch_cut";
    case ErrorCode::not_diagonalizable_or_ill_conditioned:
      return "not_diagonalizable_or_ill_conditioned";
    case ErrorCode::gap_too_small: return "gap_too_small";
    case ErrorCode::coordinate_degenerate: return "coordinate_degenerate";
    case ErrorCode::g_norm_too_large: return "g_norm_too_large";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::contraction_violated: return "contraction_violated";
    case ErrorCode::one_minus_kg_singular: return "one_minus_kg_singular";
    case ErrorCode::residual_too_large: return "residual_too_large";
    case ErrorCode::no_stabilization: return "no_stabilization";
    case ErrorCode::spectrum_in_halfplane: return "spectrum_in_halfplane";
    case ErrorCode::alpha0_in_spectrum: return "alpha0_in_spectrum";
    case ErrorCode::overflow_at_large_t: return "overflow_at_large_t";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::parse_error: return "parse_error";
  }
  return "unknown";
}

class KreinError : public std::runtime_error {
 public:
  KreinError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace krein
