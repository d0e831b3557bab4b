#ifndef GAUSSCJ_MATKERNEL_HPP
#define GAUSSCJ_MATKERNEL_HPP

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "gausscj/types.hpp"

// Dense Hermitian linear algebra used by every other module: eigensolves,
// Hermitian matrix functions, tolerance-based numerical rank.  Decompositions
// delegate to Eigen; tolerance policy and validation live here.

namespace gausscj {
namespace kernel {

struct EigResult {
  RVector values;   // ascending
  Matrix vectors;   // columns, orthonormal
};

inline bool all_finite(const Matrix& m) {
  return m.allFinite();
}

inline bool all_finite(const RMatrix& m) {
  return m.allFinite();
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const RMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols())
    fail(errc::non_square, std::string(who) + ": matrix is " +
                               std::to_string(m.rows()) + "x" +
                               std::to_string(m.cols()));
}

inline void require_finite(const Matrix& m, const char* who) {
  if (!all_finite(m))
    fail(errc::non_finite, std::string(who) + ": non-finite entries");
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(Matrix(m - m.adjoint()));
}

// Eigendecomposition of a Hermitian matrix.  The input may carry a small
// symmetry defect (relative to its magnitude); it is symmetrized before the
// solve so downstream results are exactly real-spectrum.
inline EigResult hermitian_eig(const Matrix& m,
                               const Tolerances& tol = Tolerances{}) {
  require_square(m, "hermitian_eig");
  require_finite(m, "hermitian_eig");
  const double scale = 1.0 + max_abs(m);
  if (hermiticity_defect(m) > tol.hermiticity * scale) {
    std::ostringstream os;
    os << "hermitian_eig: symmetry defect " << hermiticity_defect(m)
       << " exceeds " << tol.hermiticity * scale;
    fail(errc::non_hermitian, os.str());
  }
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    fail(errc::non_finite, "hermitian_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Real-symmetric variant; the Fock oracle works with large real matrices and
// the complex solver would double the cost for nothing.
inline void sym_eig_real(const RMatrix& m, RVector& values, RMatrix& vectors) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
  if (es.info() != Eigen::Success)
    fail(errc::non_finite, "sym_eig_real: eigensolver did not converge");
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

// exp(scale * M) for Hermitian M via the spectral decomposition.
inline Matrix matrix_exp_hermitian(const Matrix& m, double scale,
                                   const Tolerances& tol = Tolerances{}) {
  EigResult eig = hermitian_eig(m, tol);
  const double top = std::max(std::abs(scale * eig.values.minCoeff()),
                              std::abs(scale * eig.values.maxCoeff()));
  if (top > tol.exp_arg_limit) {
    std::ostringstream os;
    os << "matrix_exp_hermitian: exponent magnitude " << top
       << " exceeds guard " << tol.exp_arg_limit;
    fail(errc::overflow, os.str());
  }
  RVector w = (scale * eig.values.array()).exp();
  return eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
}

// Numerical rank: singular values above rel_tol * sigma_max.  The zero matrix
// has rank 0 by convention (no largest singular value to scale against).
inline int rank_with_tolerance(const Matrix& m, double rel_tol) {
  require_finite(m, "rank_with_tolerance");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const RVector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cut = rel_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

inline int rank_with_tolerance(const RMatrix& m, double rel_tol) {
  return rank_with_tolerance(Matrix(m.cast<Complex>()), rel_tol);
}

inline double min_eigenvalue(const Matrix& m,
                             const Tolerances& tol = Tolerances{}) {
  EigResult eig = hermitian_eig(m, tol);
  return eig.values(0);
}

inline double max_eigenvalue(const Matrix& m,
                             const Tolerances& tol = Tolerances{}) {
  EigResult eig = hermitian_eig(m, tol);
  return eig.values(eig.values.size() - 1);
}

}  // namespace kernel
}  // namespace gausscj

#endif
