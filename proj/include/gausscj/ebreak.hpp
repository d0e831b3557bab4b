#ifndef GAUSSCJ_EBREAK_HPP
#define GAUSSCJ_EBREAK_HPP

#include <vector>

#include "gausscj/cj_core.hpp"
#include "gausscj/matkernel.hpp"
#include "gausscj/types.hpp"

// Entanglement-breaking (measure-and-prepare) channels: a finite POVM on A
// followed by preparation of a state on B per outcome.  Their Choi operators
// are separable across B (x) A, hence have operator norm at most one and a
// positive partial transpose.

namespace gausscj {
namespace eb {

struct FinitePovm {
  int d_a = 0;
  std::vector<Matrix> elements;  // PSD, summing to I_A
};

struct PreparationEnsemble {
  int d_b = 0;
  std::vector<Matrix> states;  // density matrices, one per POVM outcome
};

struct EbChannel {
  FinitePovm povm;
  PreparationEnsemble ensemble;
};

inline void validate_povm(const FinitePovm& p,
                          const Tolerances& tol = Tolerances{}) {
  if (p.d_a <= 0 || p.elements.empty())
    fail(errc::invalid_povm, "validate_povm: empty POVM");
  Matrix sum = Matrix::Zero(p.d_a, p.d_a);
  for (const Matrix& m : p.elements) {
    if (m.rows() != p.d_a || m.cols() != p.d_a)
      fail(errc::invalid_povm, "validate_povm: element is not d_a x d_a");
    kernel::require_finite(m, "validate_povm");
    const double scale = 1.0 + kernel::max_abs(m);
    if (kernel::hermiticity_defect(m) > tol.hermiticity * scale)
      fail(errc::invalid_povm, "validate_povm: element not Hermitian");
    if (kernel::min_eigenvalue(m, tol) < -tol.psd)
      fail(errc::invalid_povm, "validate_povm: element not positive");
    sum += m;
  }
  sum -= Matrix::Identity(p.d_a, p.d_a);
  if (kernel::max_abs(sum) > tol.trace)
    fail(errc::invalid_povm, "validate_povm: elements do not sum to identity");
}

inline void validate_ensemble(const PreparationEnsemble& e,
                              const Tolerances& tol = Tolerances{}) {
  if (e.d_b <= 0 || e.states.empty())
    fail(errc::invalid_ensemble, "validate_ensemble: empty ensemble");
  for (const Matrix& s : e.states) {
    if (s.rows() != e.d_b || s.cols() != e.d_b)
      fail(errc::invalid_ensemble,
           "validate_ensemble: state is not d_b x d_b");
    try {
      (void)cj::make_density(s, tol);
    } catch (const error&) {
      fail(errc::invalid_ensemble,
           "validate_ensemble: entry is not a density matrix");
    }
  }
}

// Choi operator of the measure-and-prepare channel:
//   Omega = sum_alpha rho_alpha (x) conj(M_alpha),
// the conjugate taken entrywise in the fixed CJ basis.
inline cj::ChoiMatrix separable_choi(const EbChannel& ch,
                                     const Tolerances& tol = Tolerances{}) {
  validate_povm(ch.povm, tol);
  validate_ensemble(ch.ensemble, tol);
  if (ch.povm.elements.size() != ch.ensemble.states.size())
    fail(errc::dimension_mismatch,
         "separable_choi: POVM and ensemble sizes differ");
  const int da = ch.povm.d_a, db = ch.ensemble.d_b;
  Matrix c = Matrix::Zero(Eigen::Index(db) * da, Eigen::Index(db) * da);
  for (size_t a = 0; a < ch.povm.elements.size(); ++a)
    c += cj::tensor_ba(ch.ensemble.states[a],
                       ch.povm.elements[a].conjugate());
  return cj::make_choi(c, da, db, tol);
}

inline cj::DensityMatrix eb_apply(const EbChannel& ch,
                                  const cj::DensityMatrix& rho,
                                  const Tolerances& tol = Tolerances{}) {
  validate_povm(ch.povm, tol);
  validate_ensemble(ch.ensemble, tol);
  if (rho.rho.rows() != ch.povm.d_a)
    fail(errc::dimension_mismatch, "eb_apply: state dimension != d_a");
  Matrix out = Matrix::Zero(ch.ensemble.d_b, ch.ensemble.d_b);
  for (size_t a = 0; a < ch.povm.elements.size(); ++a) {
    const Complex p = (rho.rho * ch.povm.elements[a]).trace();
    out += p * ch.ensemble.states[a];
  }
  return cj::make_density(out, tol);
}

// Smallest eigenvalue after partial transposition on A.  Nonnegative (up to
// tolerance) for every separable operator; a negative value certifies
// entanglement.  Necessary-condition probe only: a nonnegative result proves
// nothing.
inline double ppt_min_eigenvalue(const Matrix& m, int d_b, int d_a,
                                 const Tolerances& tol = Tolerances{}) {
  if (m.rows() != Eigen::Index(d_b) * d_a)
    fail(errc::dimension_mismatch,
         "ppt_min_eigenvalue: matrix is not (d_b*d_a) square");
  return kernel::min_eigenvalue(cj::partial_transpose_a(m, d_b, d_a), tol);
}

inline double ppt_min_eigenvalue(const cj::ChoiMatrix& choi,
                                 const Tolerances& tol = Tolerances{}) {
  return ppt_min_eigenvalue(choi.c, choi.d_b, choi.d_a, tol);
}

}  // namespace eb
}  // namespace gausscj

#endif
