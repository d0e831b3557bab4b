#ifndef GAUSSCJ_GAUSS_CJ_HPP
#define GAUSSCJ_GAUSS_CJ_HPP

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "gausscj/matkernel.hpp"
#include "gausscj/symplectic.hpp"
#include "gausscj/types.hpp"

// Analytic structure of the Gaussian CJ operator.  Everything here reduces a
// channel spec (K, mu) to normal-mode data and evaluates closed forms:
// classification into quantum/classical noise blocks, the operator norm, the
// Gaussian exponent when every mode is mixed quantum noise, and the projector
// data when every mode is pure.

namespace gausscj {
namespace gauss {

enum class CjCase {
  case1,   // mu - (i/2) Delta_K nondegenerate: Gaussian density-like form
  case2,   // all mu_j = 1/2: scaled projector
  case3,   // Delta_K = 0, mu > 0: multiplication operator, norm det(mu)^-1/2
  case4,   // mu = 0: delta-like, unbounded and nonclosable
  mixed    // several block types present
};

enum class NormKind { exact, upper_bound, unbounded };

struct NormResult {
  NormKind kind = NormKind::exact;
  double value = 0.0;  // +inf when unbounded
};

struct ModeLabel {
  double sympl_eig = 0.0;
  bool pure = false;  // |mu_j - 1/2| within the detection window
};

struct CjClassification {
  CjCase primary = CjCase::mixed;
  bool bounded = false;
  int d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  std::vector<ModeLabel> modes;  // one per quantum pair, descending mu_j
};

struct Case1Exponent {
  double prefactor = 0.0;       // multiplies exp(-R eps R^t) in the CJ form
  double gibbs_constant = 0.0;  // prod_j (mu_j^2 - 1/4)^{-1/2}
  RMatrix epsilon;              // symmetric positive definite exponent matrix
  RVector thetas;               // ln((mu_j+1/2)/(mu_j-1/2)), descending mu_j
  RVector sympl_eigs;
};

struct Case2Data {
  double prefactor = 0.0;  // det(Delta_K)^{-1/2}, also the operator norm
  RMatrix mu_inv;
  int s = 0;
  // The CJ operator is prefactor * P0 with P0 the projector onto the
  // eigenspace of R mu_inv R^t at its lowest eigenvalue, ground_level = 2s.
  double ground_level = 0.0;
};

struct NoiseDecomposition {
  int quantum_nondegenerate = 0;  // d1
  int quantum_pure = 0;           // d2
  int classical_positive = 0;     // d3
  int classical_zero = 0;         // d4
};

struct OneModeReport {
  double k = 0.0;
  double m = 0.0;
  double gap = 0.0;              // |k^2 - 1|
  double validity_margin = 0.0;  // m - gap/2
  double mu1 = std::numeric_limits<double>::quiet_NaN();
  CjCase cj_case = CjCase::mixed;
  NormKind norm_kind = NormKind::exact;
  double norm_value = 0.0;
  bool entanglement_breaking = false;
  bool norm_at_most_one = false;
  double lambda_coeff = std::numeric_limits<double>::quiet_NaN();
  double case2_eigenvalue = std::numeric_limits<double>::quiet_NaN();
};

inline const char* to_string(CjCase c) {
  switch (c) {
    case CjCase::case1: return "1";
    case CjCase::case2: return "2";
    case CjCase::case3: return "3";
    case CjCase::case4: return "4";
    default: return "mixed";
  }
}

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::exact: return "exact";
    case NormKind::upper_bound: return "upper_bound";
    default: return "unbounded";
  }
}

namespace detail {

inline CjCase primary_case(int d1, int d2, int d3, int d4) {
  const int n = d1 + d2 + d3 + d4;
  if (d1 == n) return CjCase::case1;
  if (d2 == n) return CjCase::case2;
  if (d3 == n) return CjCase::case3;
  if (d4 == n) return CjCase::case4;
  return CjCase::mixed;
}

}  // namespace detail

inline CjClassification classify(const sympl::GaussianChannelSpec& spec,
                                 const Tolerances& tol = Tolerances{}) {
  sympl::validate_spec(spec, tol);
  sympl::WilliamsonResult wr = sympl::williamson(spec.mu, sympl::delta_k(spec), tol);
  CjClassification out;
  out.d1 = wr.d1;
  out.d2 = wr.d2;
  out.d3 = wr.d3;
  out.d4 = wr.d4;
  out.bounded = (wr.d4 == 0);
  out.primary = detail::primary_case(wr.d1, wr.d2, wr.d3, wr.d4);
  out.modes.reserve(wr.sympl_eigs.size());
  for (Eigen::Index j = 0; j < wr.sympl_eigs.size(); ++j) {
    const double mu_j = wr.sympl_eigs(j);
    out.modes.push_back({mu_j, std::abs(mu_j - 0.5) <= tol.pure_window});
  }
  return out;
}

// Operator norm of the CJ form.  Exact whenever Delta_K is nondegenerate
// (generic closed form, evaluated without the normal-mode transform) or the
// noise is purely classical and nondegenerate; a degenerate mu means an
// unbounded form, and the remaining mixed situations get det(mu)^{-1/2} as
// an upper bound.
inline NormResult cj_norm(const sympl::GaussianChannelSpec& spec,
                          const Tolerances& tol = Tolerances{}) {
  sympl::validate_spec(spec, tol);
  const RMatrix dk = sympl::delta_k(spec);
  sympl::WilliamsonResult wr = sympl::williamson(spec.mu, dk, tol);
  const int n = 2 * spec.s_b;
  if (wr.d4 > 0)
    return {NormKind::unbounded, std::numeric_limits<double>::infinity()};
  if (wr.r_dk == n) {
    // 1 / sqrt(det Delta_K * det(|Delta_K^{-1} mu| + I/2)), the matrix
    // absolute value taken over the purely imaginary eigenvalue pairs.
    Eigen::EigenSolver<RMatrix> es(dk.inverse() * spec.mu);
    if (es.info() != Eigen::Success)
      fail(errc::non_finite, "cj_norm: eigensolver failed");
    Matrix v = es.eigenvectors();
    Vector lam = es.eigenvalues();
    Vector abs_lam(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) abs_lam(i) = std::abs(lam(i));
    Matrix abs_a = v * abs_lam.asDiagonal() * v.inverse();
    abs_a += 0.5 * Matrix::Identity(n, n);
    const double det_prod = (dk.determinant() * abs_a.determinant()).real();
    return {NormKind::exact, 1.0 / std::sqrt(det_prod)};
  }
  const double det_mu = spec.mu.determinant();
  if (wr.r_dk == 0) return {NormKind::exact, 1.0 / std::sqrt(det_mu)};
  return {NormKind::upper_bound, 1.0 / std::sqrt(det_mu)};
}

// Exponent data for a fully mixed quantum channel: the CJ operator is
// prefactor * exp(-R_BA epsilon R_BA^t) with epsilon assembled from the
// normal modes, never through a matrix arccot.
inline Case1Exponent case1_exponent(const sympl::GaussianChannelSpec& spec,
                                    const Tolerances& tol = Tolerances{}) {
  sympl::validate_spec(spec, tol);
  const RMatrix dk = sympl::delta_k(spec);
  sympl::WilliamsonResult wr = sympl::williamson(spec.mu, dk, tol);
  const int n = 2 * spec.s_b;
  if (wr.r_dk != n)
    fail(errc::degenerate_delta_k,
         "case1_exponent: Delta_K is degenerate; no Gaussian exponent form");
  Case1Exponent out;
  out.sympl_eigs = wr.sympl_eigs;
  out.thetas = RVector(wr.sympl_eigs.size());
  RVector half_thetas(n);
  double gibbs = 1.0;
  for (Eigen::Index j = 0; j < wr.sympl_eigs.size(); ++j) {
    const double mu_j = wr.sympl_eigs(j);
    if (mu_j <= 0.5 + tol.pure_window) {
      std::ostringstream os;
      os << "case1_exponent: mode " << j << " has mu_j = " << mu_j
         << " at or below the pure-mode window";
      fail(errc::pure_mode_present, os.str());
    }
    const double theta = std::log((mu_j + 0.5) / (mu_j - 0.5));
    out.thetas(j) = theta;
    half_thetas(2 * j) = 0.5 * theta;
    half_thetas(2 * j + 1) = 0.5 * theta;
    gibbs /= std::sqrt(mu_j * mu_j - 0.25);
  }
  out.epsilon = wr.t * half_thetas.asDiagonal() * wr.t.transpose();
  out.gibbs_constant = gibbs;
  out.prefactor = gibbs / std::sqrt(dk.determinant());
  return out;
}

inline Case2Data case2_data(const sympl::GaussianChannelSpec& spec,
                            const Tolerances& tol = Tolerances{}) {
  sympl::validate_spec(spec, tol);
  const RMatrix dk = sympl::delta_k(spec);
  sympl::WilliamsonResult wr = sympl::williamson(spec.mu, dk, tol);
  const int n = 2 * spec.s_b;
  if (wr.r_dk != n)
    fail(errc::degenerate_delta_k,
         "case2_data: Delta_K is degenerate; no projector form");
  for (Eigen::Index j = 0; j < wr.sympl_eigs.size(); ++j)
    if (std::abs(wr.sympl_eigs(j) - 0.5) > tol.pure_window) {
      std::ostringstream os;
      os << "case2_data: mode " << j << " has mu_j = " << wr.sympl_eigs(j)
         << ", outside the pure-mode window";
      fail(errc::mixed_mode_present, os.str());
    }
  Case2Data out;
  out.prefactor = 1.0 / std::sqrt(dk.determinant());
  out.mu_inv = spec.mu.inverse();
  out.s = spec.s_b;
  out.ground_level = 2.0 * spec.s_b;
  return out;
}

inline NoiseDecomposition noise_decomposition(
    const sympl::GaussianChannelSpec& spec,
    const Tolerances& tol = Tolerances{}) {
  sympl::validate_spec(spec, tol);
  sympl::WilliamsonResult wr = sympl::williamson(spec.mu, sympl::delta_k(spec), tol);
  return {wr.d1, wr.d2, wr.d3, wr.d4};
}

// One-mode gauge-covariant family: K = k I_2, mu = m I_2 (attenuator for
// k < 1, amplifier for k > 1, classical noise at k = 1).  Valid iff
// m >= |k^2 - 1| / 2; everything below has closed forms.
inline sympl::GaussianChannelSpec one_mode_spec(double k, double m) {
  sympl::GaussianChannelSpec spec;
  spec.s_a = 1;
  spec.s_b = 1;
  spec.k = k * RMatrix::Identity(2, 2);
  spec.mu = m * RMatrix::Identity(2, 2);
  return spec;
}

inline OneModeReport one_mode_report(double k, double m,
                                     const Tolerances& tol = Tolerances{}) {
  if (!(std::isfinite(k) && std::isfinite(m)) || k < 0.0 || m < 0.0)
    fail(errc::invalid_channel,
         "one_mode_report: need finite k >= 0 and m >= 0");
  OneModeReport r;
  r.k = k;
  r.m = m;
  r.gap = std::abs(k * k - 1.0);
  r.validity_margin = m - 0.5 * r.gap;
  if (r.validity_margin < -tol.psd) {
    std::ostringstream os;
    os << "one_mode_report: m = " << m << " below the validity threshold "
       << 0.5 * r.gap;
    fail(errc::invalid_channel, os.str());
  }

  if (r.gap == 0.0) {
    // Classical noise branch: Delta_K vanishes identically.
    if (m == 0.0) {
      r.cj_case = CjCase::case4;
      r.norm_kind = NormKind::unbounded;
      r.norm_value = std::numeric_limits<double>::infinity();
    } else {
      r.cj_case = CjCase::case3;
      r.norm_kind = NormKind::exact;
      r.norm_value = 1.0 / m;
    }
  } else {
    r.mu1 = m / r.gap;
    r.norm_kind = NormKind::exact;
    r.norm_value = 1.0 / (m + 0.5 * r.gap);
    // mu1 below the window only survives validation under a loosened psd
    // tolerance; grouping it with the boundary keeps lambda well defined.
    if (r.mu1 <= 0.5 + tol.pure_window) {
      r.cj_case = CjCase::case2;
      r.case2_eigenvalue = r.gap;
    } else {
      r.cj_case = CjCase::case1;
      r.lambda_coeff = std::log((m + 0.5 * r.gap) / (m - 0.5 * r.gap)) /
                       (2.0 * r.gap);
    }
  }
  r.entanglement_breaking = (m >= 0.5 * (k * k + 1.0));
  r.norm_at_most_one =
      (r.norm_kind != NormKind::unbounded) && (r.norm_value <= 1.0 + 1e-12);
  return r;
}

}  // namespace gauss
}  // namespace gausscj

#endif
