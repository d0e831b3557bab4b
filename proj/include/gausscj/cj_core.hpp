#ifndef GAUSSCJ_CJ_CORE_HPP
#define GAUSSCJ_CJ_CORE_HPP

#include <cmath>
#include <sstream>
#include <vector>

#include "gausscj/matkernel.hpp"
#include "gausscj/types.hpp"

// Finite-dimensional channel calculus.  A channel from system A (dimension
// d_a) to system B (dimension d_b) is represented three ways: by its action
// on matrix units (ChannelBlocks), by its Choi operator on B (x) A
// (ChoiMatrix), and by Kraus operators (KrausSet).
//
// Index convention, used everywhere: the composite index on B (x) A is
// (k, i) -> k * d_a + i, with k the B index and i the A index.  The Choi
// operator entry is C[(k,i),(l,j)] = <k| Phi(|i><j|) |l>.

namespace gausscj {
namespace cj {

struct ChannelBlocks {
  int d_a = 0;
  int d_b = 0;
  std::vector<Matrix> blocks;  // blocks[i * d_a + j] = Phi(|i><j|)
};

struct ChoiMatrix {
  int d_a = 0;
  int d_b = 0;
  Matrix c;  // (d_b * d_a) square
};

struct KrausSet {
  int d_a = 0;
  int d_b = 0;
  std::vector<Matrix> ops;  // each d_b x d_a, sum V^dag V = I_A
};

struct DensityMatrix {
  Matrix rho;
};

// ---- bipartite index helpers -------------------------------------------

inline Matrix tensor_ba(const Matrix& b_factor, const Matrix& a_factor) {
  const Eigen::Index db = b_factor.rows(), da = a_factor.rows();
  Matrix out(db * da, db * da);
  for (Eigen::Index k = 0; k < db; ++k)
    for (Eigen::Index l = 0; l < db; ++l)
      out.block(k * da, l * da, da, da) = b_factor(k, l) * a_factor;
  return out;
}

inline Matrix partial_trace_b(const Matrix& m, int d_b, int d_a) {
  Matrix out = Matrix::Zero(d_a, d_a);
  for (int k = 0; k < d_b; ++k)
    out += m.block(k * d_a, k * d_a, d_a, d_a);
  return out;
}

inline Matrix partial_trace_a(const Matrix& m, int d_b, int d_a) {
  Matrix out = Matrix::Zero(d_b, d_b);
  for (int k = 0; k < d_b; ++k)
    for (int l = 0; l < d_b; ++l) {
      Complex s = 0.0;
      for (int i = 0; i < d_a; ++i) s += m(k * d_a + i, l * d_a + i);
      out(k, l) = s;
    }
  return out;
}

inline Matrix partial_transpose_a(const Matrix& m, int d_b, int d_a) {
  Matrix out(m.rows(), m.cols());
  for (int k = 0; k < d_b; ++k)
    for (int l = 0; l < d_b; ++l)
      for (int i = 0; i < d_a; ++i)
        for (int j = 0; j < d_a; ++j)
          out(k * d_a + i, l * d_a + j) = m(k * d_a + j, l * d_a + i);
  return out;
}

// ---- validation ----------------------------------------------------------

inline DensityMatrix make_density(const Matrix& rho,
                                  const Tolerances& tol = Tolerances{}) {
  kernel::require_square(rho, "make_density");
  kernel::require_finite(rho, "make_density");
  const double scale = 1.0 + kernel::max_abs(rho);
  if (kernel::hermiticity_defect(rho) > tol.hermiticity * scale)
    fail(errc::invalid_density, "make_density: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > tol.trace ||
      std::abs(rho.trace().imag()) > tol.trace)
    fail(errc::invalid_density, "make_density: trace differs from 1");
  if (kernel::min_eigenvalue(rho, tol) < -tol.psd)
    fail(errc::invalid_density, "make_density: negative eigenvalue");
  return {rho};
}

inline void validate_blocks(const ChannelBlocks& cb,
                            const Tolerances& tol = Tolerances{}) {
  if (cb.d_a <= 0 || cb.d_b <= 0 ||
      cb.blocks.size() != static_cast<size_t>(cb.d_a) * cb.d_a)
    fail(errc::dimension_mismatch, "validate_blocks: need d_a^2 blocks");
  double scale = 1.0;
  for (const Matrix& b : cb.blocks) {
    if (b.rows() != cb.d_b || b.cols() != cb.d_b)
      fail(errc::dimension_mismatch, "validate_blocks: block is not d_b x d_b");
    kernel::require_finite(b, "validate_blocks");
    scale = std::max(scale, kernel::max_abs(b));
  }
  Complex diag_trace = 0.0;
  for (int i = 0; i < cb.d_a; ++i)
    for (int j = 0; j < cb.d_a; ++j) {
      const Matrix& bij = cb.blocks[i * cb.d_a + j];
      const Matrix& bji = cb.blocks[j * cb.d_a + i];
      if (kernel::max_abs(Matrix(bji - bij.adjoint())) >
          tol.hermiticity * scale)
        fail(errc::non_hermitian,
             "validate_blocks: blocks violate B_ji = B_ij^dag");
      if (i == j) diag_trace += bij.trace();
    }
  if (std::abs(diag_trace - Complex(cb.d_a, 0)) > tol.trace * cb.d_a * scale)
    fail(errc::not_trace_preserving,
         "validate_blocks: diagonal block traces do not sum to d_a");
}

inline ChoiMatrix make_choi(const Matrix& c, int d_a, int d_b,
                            const Tolerances& tol = Tolerances{}) {
  if (d_a <= 0 || d_b <= 0 || c.rows() != Eigen::Index(d_a) * d_b)
    fail(errc::dimension_mismatch, "make_choi: matrix is not (d_b*d_a)^2");
  kernel::require_square(c, "make_choi");
  kernel::require_finite(c, "make_choi");
  const double scale = 1.0 + kernel::max_abs(c);
  if (kernel::hermiticity_defect(c) > tol.hermiticity * scale)
    fail(errc::non_hermitian, "make_choi: not Hermitian");
  const double lo = kernel::min_eigenvalue(c, tol);
  if (lo < -tol.psd) {
    std::ostringstream os;
    os << "make_choi: eigenvalue " << lo << " below -" << tol.psd
       << "; channel is not completely positive";
    fail(errc::not_completely_positive, os.str());
  }
  Matrix tb = partial_trace_b(c, d_b, d_a);
  tb -= Matrix::Identity(d_a, d_a);
  if (kernel::max_abs(tb) > tol.trace)
    fail(errc::not_trace_preserving,
         "make_choi: partial trace over B differs from identity");
  return {d_a, d_b, c};
}

// ---- operations ----------------------------------------------------------

inline ChoiMatrix choi_from_blocks(const ChannelBlocks& cb,
                                   const Tolerances& tol = Tolerances{}) {
  validate_blocks(cb, tol);
  const int da = cb.d_a, db = cb.d_b;
  Matrix c = Matrix::Zero(Eigen::Index(db) * da, Eigen::Index(db) * da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) {
      const Matrix& bij = cb.blocks[i * da + j];
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) c(k * da + i, l * da + j) = bij(k, l);
    }
  return make_choi(c, da, db, tol);
}

// Choi matrix from a Kraus set: sum of vec(V) vec(V)^dag with the composite
// vec index (k, i) -> k * d_a + i.  Validates completeness via make_choi.
inline ChoiMatrix choi_from_kraus(const KrausSet& ks,
                                  const Tolerances& tol = Tolerances{}) {
  if (ks.d_a <= 0 || ks.d_b <= 0 || ks.ops.empty())
    fail(errc::dimension_mismatch, "choi_from_kraus: empty Kraus set");
  const Eigen::Index d = Eigen::Index(ks.d_b) * ks.d_a;
  Matrix c = Matrix::Zero(d, d);
  for (const Matrix& v : ks.ops) {
    if (v.rows() != ks.d_b || v.cols() != ks.d_a)
      fail(errc::dimension_mismatch,
           "choi_from_kraus: operator is not d_b x d_a");
    kernel::require_finite(v, "choi_from_kraus");
    Vector vec(d);
    for (int k = 0; k < ks.d_b; ++k)
      for (int i = 0; i < ks.d_a; ++i) vec(Eigen::Index(k) * ks.d_a + i) = v(k, i);
    c += vec * vec.adjoint();
  }
  return make_choi(c, ks.d_a, ks.d_b, tol);
}

inline DensityMatrix apply_channel(const ChoiMatrix& choi,
                                   const DensityMatrix& rho,
                                   const Tolerances& tol = Tolerances{}) {
  if (rho.rho.rows() != choi.d_a)
    fail(errc::dimension_mismatch, "apply_channel: state dimension != d_a");
  const int da = choi.d_a, db = choi.d_b;
  Matrix out = Matrix::Zero(db, db);
  for (int k = 0; k < db; ++k)
    for (int l = 0; l < db; ++l) {
      Complex s = 0.0;
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
          s += choi.c(k * da + i, l * da + j) * rho.rho(i, j);
      out(k, l) = s;
    }
  return make_density(out, tol);
}

// Kraus operators from the Choi eigendecomposition: eigenvalues above
// kraus_drop * lambda_max each yield sqrt(lambda) times the eigenvector
// reshaped to d_b x d_a.  Ordered by descending eigenvalue.
inline KrausSet kraus_from_choi(const ChoiMatrix& choi,
                                const Tolerances& tol = Tolerances{}) {
  const int da = choi.d_a, db = choi.d_b;
  kernel::EigResult eig = kernel::hermitian_eig(choi.c, tol);
  const double lam_max = eig.values(eig.values.size() - 1);
  if (lam_max <= 0.0)
    fail(errc::not_completely_positive, "kraus_from_choi: no positive weight");
  KrausSet ks{da, db, {}};
  for (Eigen::Index l = eig.values.size() - 1; l >= 0; --l) {
    const double lam = eig.values(l);
    if (lam <= tol.kraus_drop * lam_max) continue;
    if (lam < 0.0) continue;  // unreachable for validated Choi input
    Matrix v(db, da);
    for (int k = 0; k < db; ++k)
      for (int i = 0; i < da; ++i)
        v(k, i) = std::sqrt(lam) * eig.vectors(k * da + i, l);
    ks.ops.push_back(std::move(v));
  }
  Matrix comp = Matrix::Zero(da, da);
  for (const Matrix& v : ks.ops) comp += v.adjoint() * v;
  comp -= Matrix::Identity(da, da);
  if (kernel::max_abs(comp) > tol.kraus_complete)
    fail(errc::incomplete_kraus_set,
         "kraus_from_choi: extracted set misses completeness");
  return ks;
}

inline DensityMatrix apply_kraus(const KrausSet& ks, const DensityMatrix& rho,
                                 const Tolerances& tol = Tolerances{}) {
  if (rho.rho.rows() != ks.d_a)
    fail(errc::dimension_mismatch, "apply_kraus: state dimension != d_a");
  Matrix comp = Matrix::Zero(ks.d_a, ks.d_a);
  for (const Matrix& v : ks.ops) {
    if (v.rows() != ks.d_b || v.cols() != ks.d_a)
      fail(errc::dimension_mismatch, "apply_kraus: operator is not d_b x d_a");
    comp += v.adjoint() * v;
  }
  comp -= Matrix::Identity(ks.d_a, ks.d_a);
  if (kernel::max_abs(comp) > tol.kraus_complete)
    fail(errc::incomplete_kraus_set, "apply_kraus: sum V^dag V differs from I");
  Matrix out = Matrix::Zero(ks.d_b, ks.d_b);
  for (const Matrix& v : ks.ops) out += v * rho.rho * v.adjoint();
  return make_density(out, tol);
}

// Jamiolkowski state for a full-rank diagonal reference state sigma:
// (I (x) sigma^{1/2}) C (I (x) sigma^{1/2}).  Trace-one positive by
// construction; its B marginal is sigma-independent identity scaled back.
inline DensityMatrix jam_state(const ChoiMatrix& choi,
                               const DensityMatrix& sigma,
                               const Tolerances& tol = Tolerances{}) {
  if (sigma.rho.rows() != choi.d_a)
    fail(errc::dimension_mismatch, "jam_state: sigma dimension != d_a");
  const int da = choi.d_a, db = choi.d_b;
  Matrix off = sigma.rho;
  off.diagonal().setZero();
  if (kernel::max_abs(off) > tol.hermiticity * (1.0 + kernel::max_abs(sigma.rho)))
    fail(errc::sigma_not_diagonal, "jam_state: sigma must be diagonal");
  RVector w(Eigen::Index(db) * da);
  for (int i = 0; i < da; ++i) {
    const double lam = sigma.rho(i, i).real();
    if (lam <= tol.sigma_floor)
      fail(errc::sigma_not_full_rank,
           "jam_state: sigma eigenvalue at or below floor");
    for (int k = 0; k < db; ++k) w(k * da + i) = std::sqrt(lam);
  }
  Matrix out = w.asDiagonal() * choi.c * w.asDiagonal();
  return make_density(out, tol);
}

// Inverse of jam_state: recover the matrix-unit images from a Jamiolkowski
// state and the reference-state eigenvalues.
inline ChannelBlocks recover_blocks(const DensityMatrix& rho_phi_sigma,
                                    const RVector& sigma_eigs,
                                    const Tolerances& tol = Tolerances{}) {
  const int da = static_cast<int>(sigma_eigs.size());
  if (da <= 0 || rho_phi_sigma.rho.rows() % da != 0)
    fail(errc::dimension_mismatch,
         "recover_blocks: state dimension not divisible by |sigma_eigs|");
  const int db = static_cast<int>(rho_phi_sigma.rho.rows()) / da;
  for (int i = 0; i < da; ++i)
    if (sigma_eigs(i) <= tol.sigma_floor) {
      std::ostringstream os;
      os << "recover_blocks: eigenvalue " << sigma_eigs(i)
         << " at or below floor " << tol.sigma_floor;
      fail(errc::eigenvalue_underflow, os.str());
    }
  ChannelBlocks cb{da, db, {}};
  cb.blocks.resize(static_cast<size_t>(da) * da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) {
      const double s = 1.0 / std::sqrt(sigma_eigs(i) * sigma_eigs(j));
      Matrix b(db, db);
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
          b(k, l) = s * rho_phi_sigma.rho(k * da + i, l * da + j);
      cb.blocks[i * da + j] = std::move(b);
    }
  return cb;
}

// Conjugation by I (x) (U U^T): the Choi operator of the same channel
// expressed in the rotated A basis.  Spectrum and marginals are preserved.
inline ChoiMatrix basis_change(const ChoiMatrix& choi, const Matrix& u,
                               const Tolerances& tol = Tolerances{}) {
  if (u.rows() != choi.d_a || u.cols() != choi.d_a)
    fail(errc::dimension_mismatch, "basis_change: U is not d_a x d_a");
  Matrix defect = u * u.adjoint() - Matrix::Identity(choi.d_a, choi.d_a);
  if (kernel::max_abs(defect) > tol.unitary)
    fail(errc::not_unitary, "basis_change: U is not unitary");
  Matrix w = u * u.transpose();
  Matrix g = tensor_ba(Matrix::Identity(choi.d_b, choi.d_b), w);
  return make_choi(g * choi.c * g.adjoint(), choi.d_a, choi.d_b, tol);
}

}  // namespace cj
}  // namespace gausscj

#endif
