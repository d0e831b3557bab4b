#ifndef GAUSSCJ_SYMPLECTIC_HPP
#define GAUSSCJ_SYMPLECTIC_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "gausscj/matkernel.hpp"
#include "gausscj/types.hpp"

// Phase-space machinery for bosonic Gaussian channels.  A channel acting on
// s_b output modes is described by a real linear map K and a noise form mu
// with mu >= +-(i/2) Delta_K, Delta_K = Delta_B - K^t Delta_A K.  The central
// algorithm is a generalized normal-mode decomposition of the pair
// (mu, Delta_K): a nondegenerate T with
//
//   T^t mu T      = diag(mu_1, mu_1, ..., mu_p, mu_p, 1/2 ... 1/2, 0 ... 0)
//   T^t Delta_K T = diag(Delta_std,                     0 ... 0,   0 ... 0)
//
// The four block sizes (d1 quantum mixed, d2 quantum pure, d3 classical
// positive-variance, d4 classical zero-variance) are fixed by the ranks of
// mu, Delta_K and mu - (i/2) Delta_K alone.

namespace gausscj {
namespace sympl {

struct GaussianChannelSpec {
  int s_a = 0;  // input modes
  int s_b = 0;  // output modes
  RMatrix k;    // (2 s_a) x (2 s_b)
  RMatrix mu;   // (2 s_b) x (2 s_b), symmetric
};

struct WilliamsonResult {
  RMatrix t;           // nondegenerate, columns ordered [pairs | d3 | d4]
  RVector sympl_eigs;  // mu_j, descending, one per quantum pair
  int d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  int r_mu = 0, r_dk = 0, r_c = 0;  // ranks behind the block sizes
};

struct SymplecticBasisExtension {
  RMatrix delta_ab;  // commutation form on Z_B + Z_A
  RMatrix z1, z2;    // embedded quantum blocks (d1, d2 columns)
  RMatrix z3, z4;    // [base | conjugate] columns (2*d3, 2*d4)
  RMatrix z0;        // symplectic complement of everything above
};

// Standard commutation form: direct sum of [[0,-1],[1,0]] per mode.
inline RMatrix std_delta(int s) {
  if (s < 0) fail(errc::zero_modes, "std_delta: negative mode count");
  RMatrix d = RMatrix::Zero(2 * s, 2 * s);
  for (int j = 0; j < s; ++j) {
    d(2 * j, 2 * j + 1) = -1.0;
    d(2 * j + 1, 2 * j) = 1.0;
  }
  return d;
}

inline void check_spec_shape(const GaussianChannelSpec& spec) {
  if (spec.s_a <= 0 || spec.s_b <= 0)
    fail(errc::zero_modes, "channel spec: mode counts must be positive");
  if (spec.k.rows() != 2 * spec.s_a || spec.k.cols() != 2 * spec.s_b)
    fail(errc::dimension_mismatch, "channel spec: K is not (2 s_a) x (2 s_b)");
  if (spec.mu.rows() != 2 * spec.s_b || spec.mu.cols() != 2 * spec.s_b)
    fail(errc::dimension_mismatch, "channel spec: mu is not (2 s_b) square");
  if (!spec.k.allFinite() || !spec.mu.allFinite())
    fail(errc::non_finite, "channel spec: non-finite entries");
  const double scale = 1.0 + kernel::max_abs(spec.mu);
  if (kernel::max_abs(RMatrix(spec.mu - spec.mu.transpose())) > 1e-10 * scale)
    fail(errc::invalid_channel, "channel spec: mu is not symmetric");
}

inline RMatrix delta_k(const GaussianChannelSpec& spec) {
  check_spec_shape(spec);
  RMatrix da = std_delta(spec.s_a);
  RMatrix db = std_delta(spec.s_b);
  return db - spec.k.transpose() * da * spec.k;
}

// Validity margin: smallest eigenvalue of mu + (i/2) Delta_K.  The channel
// condition mu >= +-(i/2) Delta_K holds iff the margin is >= 0 (the two sign
// choices are complex conjugates, one check covers both).
inline double validity_margin(const RMatrix& mu, const RMatrix& dk,
                              const Tolerances& tol = Tolerances{}) {
  Matrix m = mu.cast<Complex>() + Complex(0.0, 0.5) * dk.cast<Complex>();
  return kernel::min_eigenvalue(m, tol);
}

inline double validate_spec(const GaussianChannelSpec& spec,
                            const Tolerances& tol = Tolerances{}) {
  const RMatrix dk = delta_k(spec);
  const double margin = validity_margin(spec.mu, dk, tol);
  if (margin < -tol.psd) {
    std::ostringstream os;
    os << "channel spec: mu fails mu >= (i/2) Delta_K by margin " << margin;
    fail(errc::invalid_channel, os.str());
  }
  return margin;
}

// Moduli of the (purely imaginary) eigenvalues of Delta_K^{-1} mu, one per
// conjugate pair, descending.  Requires Delta_K invertible.
inline RVector symplectic_eigenvalues(const RMatrix& mu, const RMatrix& dk,
                                      const Tolerances& tol = Tolerances{}) {
  const int n = static_cast<int>(mu.rows());
  if (dk.rows() != n || dk.cols() != n || mu.cols() != n)
    fail(errc::dimension_mismatch, "symplectic_eigenvalues: shape mismatch");
  if (kernel::rank_with_tolerance(dk, tol.rank) != n)
    fail(errc::degenerate_delta_k,
         "symplectic_eigenvalues: Delta_K is singular");
  Eigen::EigenSolver<RMatrix> es(dk.inverse() * mu);
  if (es.info() != Eigen::Success)
    fail(errc::non_finite, "symplectic_eigenvalues: eigensolver failed");
  std::vector<double> im(n);
  for (int i = 0; i < n; ++i) im[i] = std::abs(es.eigenvalues()(i).imag());
  std::sort(im.begin(), im.end(), std::greater<double>());
  RVector out(n / 2);
  for (int j = 0; j < n / 2; ++j) out(j) = im[2 * j];  // pairs are adjacent
  return out;
}

namespace detail {

inline int stable_rank(const Matrix& m, const Tolerances& tol,
                       const char* what) {
  const int r1 = kernel::rank_with_tolerance(m, tol.rank);
  const int r2 = kernel::rank_with_tolerance(m, tol.rank_recheck);
  if (r1 != r2) {
    std::ostringstream os;
    os << what << ": numerical rank " << r1 << " at cutoff " << tol.rank
       << " but " << r2 << " at " << tol.rank_recheck
       << "; decomposition would not be trustworthy";
    fail(errc::rank_instability, os.str());
  }
  return r1;
}

inline int stable_rank(const RMatrix& m, const Tolerances& tol,
                       const char* what) {
  return stable_rank(Matrix(m.cast<Complex>()), tol, what);
}

}  // namespace detail

inline WilliamsonResult williamson(const RMatrix& mu, const RMatrix& dk,
                                   const Tolerances& tol = Tolerances{}) {
  const int n = static_cast<int>(mu.rows());
  if (n % 2 != 0 || mu.cols() != n || dk.rows() != n || dk.cols() != n)
    fail(errc::dimension_mismatch, "williamson: need matching even dimension");
  if (!mu.allFinite() || !dk.allFinite())
    fail(errc::non_finite, "williamson: non-finite entries");
  {
    const double margin = validity_margin(mu, dk, tol);
    if (margin < -tol.psd) {
      std::ostringstream os;
      os << "williamson: pair violates mu >= (i/2) Delta_K by " << margin;
      fail(errc::invalid_pair, os.str());
    }
  }

  WilliamsonResult res;
  res.r_mu = detail::stable_rank(mu, tol, "williamson[mu]");
  res.r_dk = detail::stable_rank(dk, tol, "williamson[Delta_K]");
  Matrix mc = mu.cast<Complex>() - Complex(0.0, 0.5) * dk.cast<Complex>();
  res.r_c = detail::stable_rank(mc, tol, "williamson[mu - (i/2) Delta_K]");
  if (res.r_dk % 2 != 0)
    fail(errc::rank_instability,
         "williamson: odd rank for the antisymmetric form");

  res.d4 = n - res.r_mu;
  res.d3 = res.r_mu - res.r_dk;
  res.d2 = 2 * (res.r_mu - res.r_c);
  res.d1 = res.r_dk - res.d2;
  if (res.d3 < 0 || res.d1 < 0)
    fail(errc::rank_instability, "williamson: inconsistent rank triple");

  // Split ker mu (zero-variance directions) from its range, then whiten the
  // range so mu becomes the identity there.
  Eigen::SelfAdjointEigenSolver<RMatrix> mes(mu);
  if (mes.info() != Eigen::Success)
    fail(errc::non_finite, "williamson: eigensolver failed on mu");
  const RVector mv = mes.eigenvalues();  // ascending; mu is PSD for valid pairs
  const RMatrix q4 = mes.eigenvectors().leftCols(res.d4);
  const RMatrix qr = mes.eigenvectors().rightCols(res.r_mu);
  RMatrix w(n, res.r_mu);
  for (int j = 0; j < res.r_mu; ++j) {
    if (mv(res.d4 + j) <= 0.0)
      fail(errc::rank_instability,
           "williamson: negative eigenvalue inside the range of mu");
    w.col(j) = qr.col(j) / std::sqrt(mv(res.d4 + j));
  }

  res.t = RMatrix::Zero(n, n);
  res.sympl_eigs = RVector::Zero(res.r_dk / 2);

  if (res.r_mu > 0) {
    RMatrix dw = w.transpose() * dk * w;
    dw = 0.5 * (dw - dw.transpose().eval());  // exact antisymmetry

    const int pairs = res.r_dk / 2;
    RMatrix pair_x(res.r_mu, 2 * pairs);  // whitened unit columns, pre-scaling
    RVector pair_scale(pairs);
    if (pairs > 0) {
      // i * dw is Hermitian with eigenvalues +-s_j; for the +s_j eigenvector
      // v = a + i b, sqrt(2) a and sqrt(2) b are orthonormal with
      // dw a = s b, dw b = -s a, so the (a, b) columns carry the block
      // s * [[0,-1],[1,0]].  Scaling both by 1/sqrt(s_j) normalizes the
      // block to the standard form and turns the mu block into (1/s_j) I,
      // so mu_j = 1/s_j; ascending s gives descending mu_j.
      Matrix hw = Complex(0.0, 1.0) * dw.cast<Complex>();
      kernel::EigResult he = kernel::hermitian_eig(hw, tol);
      for (int j = 0; j < pairs; ++j) {
        const int idx = res.r_mu - pairs + j;
        const double s = he.values(idx);
        if (s <= 0.0)
          fail(errc::rank_instability,
               "williamson: nonpositive canonical frequency");
        pair_x.col(2 * j) = std::sqrt(2.0) * he.vectors.col(idx).real();
        pair_x.col(2 * j + 1) = std::sqrt(2.0) * he.vectors.col(idx).imag();
        pair_scale(j) = 1.0 / std::sqrt(s);
        res.sympl_eigs(j) = 1.0 / s;
      }
    }

    for (int j = 0; j < pairs; ++j) {
      res.t.col(2 * j) = w * (pair_scale(j) * pair_x.col(2 * j));
      res.t.col(2 * j + 1) = w * (pair_scale(j) * pair_x.col(2 * j + 1));
    }

    if (res.d3 > 0) {
      // Kernel directions of dw inside the whitened range: classical noise
      // with positive variance, scaled so the mu block reads 1/2.  The
      // kernel is orthogonal to the pair columns up to roundoff; project and
      // re-orthonormalize within the block (mixing inside it is harmless,
      // the targets there are isotropic).
      Eigen::JacobiSVD<RMatrix> svd(dw, Eigen::ComputeFullV);
      RMatrix n3 = svd.matrixV().rightCols(res.d3);
      if (pairs > 0) n3 -= pair_x * (pair_x.transpose() * n3);
      Eigen::HouseholderQR<RMatrix> qr(n3);
      n3 = RMatrix(qr.householderQ()).leftCols(res.d3);
      res.t.block(0, res.d1 + res.d2, n, res.d3) =
          w * n3 * (1.0 / std::sqrt(2.0));
    }
  }

  if (res.d4 > 0) res.t.rightCols(res.d4) = q4;

  if (std::abs(res.t.determinant()) <= 0.0)
    fail(errc::rank_instability, "williamson: assembled T is singular");
  return res;
}

inline WilliamsonResult williamson(const GaussianChannelSpec& spec,
                                   const Tolerances& tol = Tolerances{}) {
  validate_spec(spec, tol);
  return williamson(spec.mu, delta_k(spec), tol);
}

// Commutation form on the composite phase space Z_B + Z_A whose restriction
// to Z_B is Delta_K: blocks [[Delta_K, -K^t Delta_A], [-Delta_A K, -Delta_A]].
inline RMatrix delta_ab(const GaussianChannelSpec& spec) {
  check_spec_shape(spec);
  const int nb = 2 * spec.s_b, na = 2 * spec.s_a;
  RMatrix da = std_delta(spec.s_a);
  RMatrix out(nb + na, nb + na);
  out.topLeftCorner(nb, nb) = delta_k(spec);
  out.topRightCorner(nb, na) = -spec.k.transpose() * da;
  out.bottomLeftCorner(na, nb) = -da * spec.k;
  out.bottomRightCorner(na, na) = -da;
  return out;
}

// Extend the normal-mode basis of Z_B to a decomposition of Z_B + Z_A into
// five mutually Delta_AB-orthogonal groups: the two quantum blocks, the two
// classical blocks completed by conjugate vectors h_j with
// Delta_AB(e_j, h_k) = delta_jk, and the symplectic complement Z_0.
inline SymplecticBasisExtension extend_decomposition(
    const GaussianChannelSpec& spec, const WilliamsonResult& wr,
    const Tolerances& tol = Tolerances{}) {
  const int nb = 2 * spec.s_b, na = 2 * spec.s_a, n = nb + na;
  if (wr.t.rows() != nb)
    fail(errc::dimension_mismatch,
         "extend_decomposition: decomposition does not match s_b");
  SymplecticBasisExtension ext;
  ext.delta_ab = delta_ab(spec);

  RMatrix embedded = RMatrix::Zero(n, nb);  // T columns, padded with Z_A zeros
  embedded.topRows(nb) = wr.t;

  const int d12 = wr.d1 + wr.d2;
  const int d34 = wr.d3 + wr.d4;
  ext.z1 = embedded.leftCols(wr.d1);
  ext.z2 = embedded.middleCols(wr.d1, wr.d2);

  RMatrix h(n, 0);
  if (d34 > 0) {
    // Least-norm solve for the conjugate vectors: rows are the constraints
    // Delta_AB(e_i, h_j) = [i in blocks 3,4 and i == j], for every basis
    // vector e_i including the quantum blocks.
    RMatrix rows = embedded.transpose() * ext.delta_ab;  // nb x n
    RMatrix rhs = RMatrix::Zero(nb, d34);
    for (int j = 0; j < d34; ++j) rhs(d12 + j, j) = 1.0;
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(rows);
    if (cod.rank() < nb)
      fail(errc::rank_instability,
           "extend_decomposition: constraint rows are rank-deficient");
    h = cod.solve(rhs);
    // Symplectic Gram-Schmidt correction h_j -> h_j - sum_k (A_jk/2) e_k with
    // A = h^t Delta_AB h removes the pairwise h-h form without touching the
    // constraints (the e_k here span the Delta_AB-null blocks 3 and 4).
    RMatrix base34 = embedded.rightCols(d34);
    RMatrix a = h.transpose() * ext.delta_ab * h;
    a = 0.5 * (a - a.transpose().eval());
    h -= base34 * (0.5 * a).transpose();
  }

  ext.z3 = RMatrix(n, 2 * wr.d3);
  ext.z3.leftCols(wr.d3) = embedded.middleCols(d12, wr.d3);
  ext.z3.rightCols(wr.d3) = h.leftCols(wr.d3);
  ext.z4 = RMatrix(n, 2 * wr.d4);
  ext.z4.leftCols(wr.d4) = embedded.middleCols(d12 + wr.d3, wr.d4);
  ext.z4.rightCols(wr.d4) = h.rightCols(wr.d4);

  // Z_0: kernel of U^t Delta_AB where U collects every vector so far.  The
  // form is nondegenerate, so the kernel dimension is exactly n - (nb + d34).
  RMatrix u(n, nb + d34);
  u.leftCols(nb) = embedded;
  u.rightCols(d34) = h;
  RMatrix m = u.transpose() * ext.delta_ab;
  Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullV);
  const int z0_dim = n - (nb + d34);
  ext.z0 = svd.matrixV().rightCols(z0_dim);
  return ext;
}

}  // namespace sympl
}  // namespace gausscj

#endif
