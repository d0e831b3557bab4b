#include <catch2/catch_amalgamated.hpp>

#include "testkit.hpp"

namespace gc = gausscj;
using gc::Complex;
using gc::Matrix;
using testkit::error_code_of;

namespace {

Matrix ket_proj(int d, int i) {
  Matrix m = Matrix::Zero(d, d);
  m(i, i) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("povm validation names each violation") {
  gc::eb::FinitePovm empty{2, {}};
  CHECK(error_code_of([&] { gc::eb::validate_povm(empty); }) ==
        gc::errc::invalid_povm);

  gc::eb::FinitePovm short_sum{2, {0.5 * Matrix::Identity(2, 2)}};
  CHECK(error_code_of([&] { gc::eb::validate_povm(short_sum); }) ==
        gc::errc::invalid_povm);

  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  gc::eb::FinitePovm negative{2, {neg, Matrix::Identity(2, 2) - neg}};
  CHECK(error_code_of([&] { gc::eb::validate_povm(negative); }) ==
        gc::errc::invalid_povm);

  gc::eb::FinitePovm ok{2, {ket_proj(2, 0), ket_proj(2, 1)}};
  CHECK_NOTHROW(gc::eb::validate_povm(ok));
}

TEST_CASE("ensemble validation rejects non-states") {
  gc::eb::PreparationEnsemble bad{2, {2.0 * Matrix::Identity(2, 2)}};
  CHECK(error_code_of([&] { gc::eb::validate_ensemble(bad); }) ==
        gc::errc::invalid_ensemble);
  gc::eb::PreparationEnsemble ok{2, {0.5 * Matrix::Identity(2, 2)}};
  CHECK_NOTHROW(gc::eb::validate_ensemble(ok));
}

TEST_CASE("classical measure-and-prepare channel has diagonal Choi operator") {
  // Measure in the computational basis, re-prepare the outcome:
  // Omega = |00><00| + |11><11| = diag(1, 0, 0, 1) in the composite basis.
  gc::eb::EbChannel ch;
  ch.povm = {2, {ket_proj(2, 0), ket_proj(2, 1)}};
  ch.ensemble = {2, {ket_proj(2, 0), ket_proj(2, 1)}};
  gc::cj::ChoiMatrix choi = gc::eb::separable_choi(ch);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 1.0;
  expect(3, 3) = 1.0;
  CHECK(gc::kernel::max_abs(Matrix(choi.c - expect)) < 1e-14);
  CHECK(std::abs(gc::kernel::max_eigenvalue(choi.c) - 1.0) < 1e-12);
  CHECK(gc::eb::ppt_min_eigenvalue(choi) > -1e-12);
}

TEST_CASE("separable_choi agrees with the matrix-unit construction") {
  testkit::Rng rng(71);
  for (int trial = 0; trial < 4; ++trial) {
    const int da = 2 + trial % 3, db = 2 + (trial + 1) % 2;
    gc::eb::EbChannel ch = testkit::random_eb_channel(rng, da, db, da + 1);
    gc::cj::ChoiMatrix direct = gc::eb::separable_choi(ch);

    // Phi(|i><j|) = sum_a <j| M_a |i> rho_a rebuilt as explicit blocks.
    gc::cj::ChannelBlocks cb{da, db, {}};
    cb.blocks.resize(static_cast<size_t>(da) * da);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j) {
        Matrix b = Matrix::Zero(db, db);
        for (size_t a = 0; a < ch.povm.elements.size(); ++a)
          b += ch.povm.elements[a](j, i) * ch.ensemble.states[a];
        cb.blocks[i * da + j] = b;
      }
    gc::cj::ChoiMatrix via_blocks = gc::cj::choi_from_blocks(cb);
    CHECK(gc::kernel::max_abs(Matrix(via_blocks.c - direct.c)) < 1e-10);
  }
}

TEST_CASE("eb_apply matches the Choi contraction") {
  testkit::Rng rng(73);
  for (int trial = 0; trial < 4; ++trial) {
    const int da = 2 + trial % 2, db = 2 + trial % 3;
    gc::eb::EbChannel ch = testkit::random_eb_channel(rng, da, db, da + 2);
    gc::cj::ChoiMatrix choi = gc::eb::separable_choi(ch);
    gc::cj::DensityMatrix rho = testkit::random_density(rng, da);
    gc::cj::DensityMatrix direct = gc::eb::eb_apply(ch, rho);
    gc::cj::DensityMatrix via_choi = gc::cj::apply_channel(choi, rho);
    CHECK(gc::kernel::max_abs(Matrix(direct.rho - via_choi.rho)) < 1e-10);
  }
}

TEST_CASE("separable Choi operators are norm-bounded with positive PT") {
  testkit::Rng rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const int da = 2 + trial % 3, db = 2 + (trial + 1) % 3;
    gc::eb::EbChannel ch = testkit::random_eb_channel(rng, da, db, da + 1);
    gc::cj::ChoiMatrix choi = gc::eb::separable_choi(ch);
    CHECK(gc::kernel::max_eigenvalue(choi.c) <= 1.0 + 1e-10);
    CHECK(gc::eb::ppt_min_eigenvalue(choi) >= -1e-9);
  }
}

TEST_CASE("the identity channel is maximally non-separable under the probe") {
  Matrix c = Matrix::Zero(4, 4);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) c(k * 2 + k, l * 2 + l) = 1.0;
  gc::cj::ChoiMatrix choi = gc::cj::make_choi(c, 2, 2);
  CHECK(std::abs(gc::eb::ppt_min_eigenvalue(choi) + 1.0) < 1e-12);
  CHECK(error_code_of([&] {
          gc::eb::ppt_min_eigenvalue(Matrix::Identity(3, 3), 2, 2);
        }) == gc::errc::dimension_mismatch);
}

TEST_CASE("separable_choi rejects mismatched povm and ensemble") {
  gc::eb::EbChannel ch;
  ch.povm = {2, {ket_proj(2, 0), ket_proj(2, 1)}};
  ch.ensemble = {2, {0.5 * Matrix::Identity(2, 2)}};
  CHECK(error_code_of([&] { gc::eb::separable_choi(ch); }) ==
        gc::errc::dimension_mismatch);
}
