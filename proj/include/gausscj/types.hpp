#ifndef GAUSSCJ_TYPES_HPP
#define GAUSSCJ_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gausscj {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using Vector  = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Every failure mode raised by the library.  Codes are stable identifiers;
// messages are for humans and carry the offending values.
enum class errc {
  non_square,
  non_finite,
  non_hermitian,
  overflow,
  dimension_mismatch,
  not_completely_positive,
  not_trace_preserving,
  invalid_density,
  sigma_not_diagonal,
  sigma_not_full_rank,
  eigenvalue_underflow,
  not_unitary,
  incomplete_kraus_set,
  invalid_povm,
  invalid_ensemble,
  invalid_pair,
  rank_instability,
  zero_modes,
  degenerate_delta_k,
  invalid_channel,
  pure_mode_present,
  mixed_mode_present,
  pure_mode,
  not_case1,
  truncation_too_small,
  parse_error,
  io_error
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw error(code, msg);
}

// Numerical policy knobs.  Call sites take a Tolerances argument (defaulted)
// instead of hard-coding cutoffs; the CLI exposes the rank/psd members.
struct Tolerances {
  double hermiticity   = 1e-10;  // admissible relative symmetry defect
  double psd           = 1e-10;  // eigenvalue floor for positivity checks
  double trace         = 1e-10;  // trace / partial-trace residual
  double rank          = 1e-9;   // relative singular-value cutoff
  double rank_recheck  = 1e-8;   // second cutoff; rank must agree at both
  double pure_window   = 1e-7;   // |mu_j - 1/2| window flagging pure modes
  double kraus_drop    = 1e-12;  // relative eigenvalue cutoff, Kraus extraction
  double kraus_complete = 1e-9;  // completeness residual for Kraus sets
  double unitary       = 1e-10;  // ||U U^dag - I|| bound
  double sigma_floor   = 1e-8;   // reference-state eigenvalue floor
  double exp_arg_limit = 700.0;  // |scale * lambda| guard before exponentiating
};

}  // namespace gausscj

#endif
