#ifndef GAUSSCJ_FOCK_ORACLE_HPP
#define GAUSSCJ_FOCK_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "gausscj/matkernel.hpp"
#include "gausscj/types.hpp"

// Truncated Fock-space oracle for the one-mode gauge-covariant family.  It
// builds the CJ operator by exponentiating the raw two-mode quadratic
// (q_B - k q_A)^2 + (p_B + k p_A)^2 in the number basis, with no use of the
// normal-mode machinery, so its output is an independent check of every
// closed form.  Composite indices follow the library convention
// (n_B, n_A) -> n_B * N + n_A.

namespace gausscj {
namespace fock {

struct FockOps {
  int n = 0;
  RMatrix a;    // lowering: a|m> = sqrt(m)|m-1>
  RMatrix q;    // (a + a^dag)/sqrt(2)
  Matrix p;     // (a - a^dag)/(i sqrt(2)), purely imaginary entries
  RMatrix num;  // a^dag a = diag(0..n-1), exact under truncation
};

struct TwoModeQuadratic {
  double k = 0.0;
  int n = 0;
  RMatrix h;  // (n^2) x (n^2) real symmetric, PSD
};

// Eigensystem of the quadratic.  The operator commutes with the photon
// number difference n_B - n_A (the cross terms reduce to a a' + a^dag a'^dag,
// an entrywise-exact cancellation that survives truncation), so after a
// runtime check that every off-block entry vanishes the solve proceeds per
// conserved-difference block.  If the check ever fails the dense eigensolve
// runs instead; either way the spectrum is that of the raw assembled matrix.
struct QuadEigensystem {
  double k = 0.0;
  int n = 0;
  bool blocked = false;
  double min_eigenvalue = 0.0;
  std::vector<std::vector<int>> index;  // composite indices per block
  std::vector<RVector> values;          // ascending within each block
  std::vector<RMatrix> vectors;
};

struct ThermalCheck {
  double max_deviation = 0.0;   // vs the geometric law, lowest n/2 levels
  double max_eigenvalue = 0.0;  // should equal 1/(mu_j + 1/2)
};

inline FockOps build_ops(int n) {
  if (n < 2) fail(errc::truncation_too_small, "build_ops: need n >= 2");
  FockOps ops;
  ops.n = n;
  ops.a = RMatrix::Zero(n, n);
  for (int m = 1; m < n; ++m) ops.a(m - 1, m) = std::sqrt(double(m));
  const double r = 1.0 / std::sqrt(2.0);
  ops.q = r * (ops.a + ops.a.transpose());
  ops.p = Complex(0.0, -1.0) * r *
          (ops.a - ops.a.transpose()).cast<Complex>();
  ops.num = RMatrix::Zero(n, n);
  for (int m = 0; m < n; ++m) ops.num(m, m) = double(m);
  return ops;
}

inline TwoModeQuadratic quad_operator(double k, int n) {
  if (n < 8)
    fail(errc::truncation_too_small, "quad_operator: need n >= 8");
  if (!(std::isfinite(k)) || k < 0.0)
    fail(errc::invalid_channel, "quad_operator: need finite k >= 0");
  FockOps ops = build_ops(n);
  // With p = i P (P real antisymmetric) the quadratic expands into Kronecker
  // products of n x n factors:
  //   (q_B - k q_A)^2 + (p_B + k p_A)^2
  //     = (q^2 + p^2) (x) I + k^2 I (x) (q^2 + p^2) - 2k (q (x) q + P (x) P).
  const double r = 1.0 / std::sqrt(2.0);
  RMatrix pr = -r * (ops.a - ops.a.transpose());  // P, where p = i P
  RMatrix qp2 = ops.q * ops.q - pr * pr;          // q^2 + p^2
  TwoModeQuadratic quad;
  quad.k = k;
  quad.n = n;
  const Eigen::Index nn = Eigen::Index(n) * n;
  quad.h = RMatrix::Zero(nn, nn);
  const double cross = -2.0 * k;
  for (int kb = 0; kb < n; ++kb)
    for (int lb = 0; lb < n; ++lb) {
      RMatrix blk = qp2(kb, lb) * RMatrix::Identity(n, n);
      if (kb == lb) blk += (k * k) * qp2;
      blk += cross * (ops.q(kb, lb) * ops.q + pr(kb, lb) * pr);
      quad.h.block(Eigen::Index(kb) * n, Eigen::Index(lb) * n, n, n) = blk;
    }
  return quad;
}

namespace detail {

inline std::vector<std::vector<int>> difference_blocks(int n) {
  std::vector<std::vector<int>> blocks;
  blocks.reserve(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    std::vector<int> idx;
    for (int na = std::max(0, -d); na <= std::min(n - 1, n - 1 - d); ++na)
      idx.push_back((na + d) * n + na);
    blocks.push_back(std::move(idx));
  }
  return blocks;
}

}  // namespace detail

inline QuadEigensystem quad_eigensystem(const TwoModeQuadratic& quad) {
  const int n = quad.n;
  const Eigen::Index nn = Eigen::Index(n) * n;
  QuadEigensystem sys;
  sys.k = quad.k;
  sys.n = n;

  std::vector<int> block_of(nn);
  for (int nb = 0; nb < n; ++nb)
    for (int na = 0; na < n; ++na) block_of[nb * n + na] = nb - na;

  // Off-block entries cancel exactly in the assembly; allow only for
  // floating-point contraction residue before trusting the block split.
  const double guard = 1e-12 * (1.0 + kernel::max_abs(quad.h));
  bool clean = true;
  for (Eigen::Index r = 0; r < nn && clean; ++r)
    for (Eigen::Index c = 0; c < nn; ++c)
      if (block_of[r] != block_of[c] && std::abs(quad.h(r, c)) > guard) {
        clean = false;
        break;
      }

  if (clean) {
    sys.blocked = true;
    sys.index = detail::difference_blocks(n);
    double lo = std::numeric_limits<double>::infinity();
    for (const std::vector<int>& idx : sys.index) {
      const int b = static_cast<int>(idx.size());
      RMatrix sub(b, b);
      for (int r = 0; r < b; ++r)
        for (int c = 0; c < b; ++c) sub(r, c) = quad.h(idx[r], idx[c]);
      RVector vals;
      RMatrix vecs;
      kernel::sym_eig_real(sub, vals, vecs);
      lo = std::min(lo, vals(0));
      sys.values.push_back(std::move(vals));
      sys.vectors.push_back(std::move(vecs));
    }
    sys.min_eigenvalue = lo;
  } else {
    sys.blocked = false;
    std::vector<int> all(nn);
    for (Eigen::Index i = 0; i < nn; ++i) all[i] = static_cast<int>(i);
    RVector vals;
    RMatrix vecs;
    kernel::sym_eig_real(quad.h, vals, vecs);
    sys.index.push_back(std::move(all));
    sys.values.push_back(std::move(vals));
    sys.vectors.push_back(std::move(vecs));
    sys.min_eigenvalue = sys.values[0](0);
  }
  return sys;
}

// Gaussian coefficients of the one-mode CJ operator, valid strictly inside
// the mixed-noise region m > |k^2 - 1|/2 with k != 1.
struct OneModeCoefficients {
  double c = 0.0;       // overall prefactor
  double lambda = 0.0;  // exponent coefficient
};

inline OneModeCoefficients one_mode_coefficients(
    double k, double m, const Tolerances& tol = Tolerances{}) {
  const double gap = std::abs(k * k - 1.0);
  if (gap == 0.0)
    fail(errc::not_case1,
         "one_mode_coefficients: k = 1 has no Gaussian exponent form");
  const double mu1 = m / gap;
  if (!(mu1 > 0.5 + tol.pure_window)) {
    std::ostringstream os;
    os << "one_mode_coefficients: m = " << m
       << " is not strictly inside the mixed-noise region (threshold "
       << 0.5 * gap << ")";
    fail(errc::not_case1, os.str());
  }
  OneModeCoefficients co;
  co.c = 1.0 / std::sqrt(m * m - 0.25 * gap * gap);
  co.lambda = std::log((m + 0.5 * gap) / (m - 0.5 * gap)) / (2.0 * gap);
  return co;
}

inline double norm_from_eigensystem(const QuadEigensystem& sys, double m,
                                    const Tolerances& tol = Tolerances{}) {
  OneModeCoefficients co = one_mode_coefficients(sys.k, m, tol);
  return co.c * std::exp(-co.lambda * sys.min_eigenvalue);
}

inline Matrix omega_from_eigensystem(const QuadEigensystem& sys, double m,
                                     const Tolerances& tol = Tolerances{}) {
  OneModeCoefficients co = one_mode_coefficients(sys.k, m, tol);
  const Eigen::Index nn = Eigen::Index(sys.n) * sys.n;
  RMatrix out = RMatrix::Zero(nn, nn);
  for (size_t b = 0; b < sys.index.size(); ++b) {
    const std::vector<int>& idx = sys.index[b];
    const int sz = static_cast<int>(idx.size());
    RVector w = ((-co.lambda * sys.values[b].array()).exp() * co.c).matrix();
    RMatrix blk = sys.vectors[b] * w.asDiagonal() * sys.vectors[b].transpose();
    for (int r = 0; r < sz; ++r)
      for (int c = 0; c < sz; ++c) out(idx[r], idx[c]) = blk(r, c);
  }
  return out.cast<Complex>();
}

inline Matrix omega_numeric(double k, double m, int n,
                            const Tolerances& tol = Tolerances{}) {
  return omega_from_eigensystem(quad_eigensystem(quad_operator(k, n)), m, tol);
}

inline double omega_norm_numeric(double k, double m, int n,
                                 const Tolerances& tol = Tolerances{}) {
  return norm_from_eigensystem(quad_eigensystem(quad_operator(k, n)), m, tol);
}

// Largest deviation |(Tr_B Omega)_{ij} - delta_ij| over i, j < levels, with
// the B sum restricted to n_B < window (window <= 0 means the whole
// eigensystem).  The infinite-dimensional marginal is exactly the identity;
// a finite window misses tail weight and the deviation must shrink as the
// window grows.
inline double partial_trace_deviation(const QuadEigensystem& sys, double m,
                                      int levels, int window = -1,
                                      const Tolerances& tol = Tolerances{}) {
  const int cut = window <= 0 ? sys.n : window;
  if (levels < 1 || levels > cut / 3 || cut > sys.n)
    fail(errc::truncation_too_small,
         "partial_trace_deviation: need 1 <= levels <= window/3 <= n/3");
  OneModeCoefficients co = one_mode_coefficients(sys.k, m, tol);
  const int n = sys.n;
  RMatrix tr = RMatrix::Zero(levels, levels);
  for (size_t b = 0; b < sys.index.size(); ++b) {
    const std::vector<int>& idx = sys.index[b];
    const int sz = static_cast<int>(idx.size());
    RVector w = ((-co.lambda * sys.values[b].array()).exp() * co.c).matrix();
    // Composite index idx[r] = n_B * n + n_A; the pair (i, j) of A-levels
    // contributes at matching n_B, which inside one block forces i == j.
    for (int r = 0; r < sz; ++r) {
      const int na = idx[r] % n;
      const int nb_r = idx[r] / n;
      if (na >= levels || nb_r >= cut) continue;
      for (int c = 0; c < sz; ++c) {
        const int nac = idx[c] % n;
        if (idx[c] / n != nb_r || nac >= levels) continue;
        double s = 0.0;
        for (int l = 0; l < sz; ++l)
          s += w(l) * sys.vectors[b](r, l) * sys.vectors[b](c, l);
        tr(na, nac) += s;
      }
    }
  }
  tr -= RMatrix::Identity(levels, levels);
  return kernel::max_abs(tr);
}

// Convergence test of the truncation window itself: the operator entries are
// evaluated on a padded space (truncation n + n/2) so that eigen-edge error
// stays far below the window tail being measured, then the B sum runs over
// n_B < n.  omega_numeric is untouched by the padding; the spectral-mapping
// identity stays exact at truncation n.
inline double verify_partial_trace(double k, double m, int n, int levels,
                                   const Tolerances& tol = Tolerances{}) {
  if (n < 8) fail(errc::truncation_too_small, "verify_partial_trace: n < 8");
  const int padded = n + n / 2;
  return partial_trace_deviation(quad_eigensystem(quad_operator(k, padded)),
                                 m, levels, n, tol);
}

// Check the thermal normal-mode law: exp(-theta(mu_j) a^dag a), normalized
// by the analytic partition function, run through the eigensolve+exponential
// pipeline and compared with the geometric spectrum.
inline ThermalCheck thermal_spectrum_check(double mu_j, int n,
                                           const Tolerances& tol = Tolerances{}) {
  if (n < 4) fail(errc::truncation_too_small, "thermal_spectrum_check: n < 4");
  if (!(mu_j > 0.5 + tol.pure_window)) {
    std::ostringstream os;
    os << "thermal_spectrum_check: mu_j = " << mu_j
       << " inside the pure-mode window; the exponent diverges";
    fail(errc::pure_mode, os.str());
  }
  const double theta = std::log((mu_j + 0.5) / (mu_j - 0.5));
  FockOps ops = build_ops(n);
  Matrix rho = kernel::matrix_exp_hermitian(ops.num.cast<Complex>(), -theta, tol);
  rho *= (1.0 - std::exp(-theta));
  kernel::EigResult eig = kernel::hermitian_eig(rho, tol);
  ThermalCheck out;
  out.max_eigenvalue = eig.values(eig.values.size() - 1);
  const double ratio = (mu_j - 0.5) / (mu_j + 0.5);
  double dev = 0.0;
  for (int level = 0; level < n / 2; ++level) {
    const double law = std::pow(ratio, level) / (mu_j + 0.5);
    const double got = eig.values(eig.values.size() - 1 - level);
    dev = std::max(dev, std::abs(got - law));
  }
  out.max_deviation = dev;
  return out;
}

// Entanglement probe: smallest eigenvalue of the partial transpose of
// (I (x) sigma^{1/2}) Omega (I (x) sigma^{1/2}) with sigma thermal at mean
// occupation nbar.  Diagnostic only; truncation keeps it a necessary-side
// witness, never a proof of separability.
inline double ppt_probe_truncated(double k, double m, double nbar, int n,
                                  const Tolerances& tol = Tolerances{}) {
  if (!(nbar > 0.0))
    fail(errc::invalid_channel, "ppt_probe_truncated: need nbar > 0");
  Matrix omega = omega_numeric(k, m, n, tol);
  const Eigen::Index nn = Eigen::Index(n) * n;
  RVector w(nn);
  const double base = nbar / (nbar + 1.0);
  for (int nb = 0; nb < n; ++nb)
    for (int na = 0; na < n; ++na)
      w(Eigen::Index(nb) * n + na) =
          std::sqrt(std::pow(base, na) / (nbar + 1.0));
  Matrix jam = w.asDiagonal() * omega * w.asDiagonal();
  Matrix pt(nn, nn);
  for (int kb = 0; kb < n; ++kb)
    for (int lb = 0; lb < n; ++lb)
      for (int ia = 0; ia < n; ++ia)
        for (int ja = 0; ja < n; ++ja)
          pt(Eigen::Index(kb) * n + ia, Eigen::Index(lb) * n + ja) =
              jam(Eigen::Index(kb) * n + ja, Eigen::Index(lb) * n + ia);
  return kernel::min_eigenvalue(pt, tol);
}

}  // namespace fock
}  // namespace gausscj

#endif
