#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "testkit.hpp"

// Integration gate: every release-blocking numerical contract in one binary.
// Each criterion prints a single [PASS]/[FAIL] line with its measured
// figures; the process exits nonzero if any line fails.

namespace gc = gausscj;

namespace {

bool g_all_pass = true;

void record(int num, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", num,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) g_all_pass = false;
}

template <typename F>
void run(int num, const char* label, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    record(num, false, std::string(label) + " raised: " + e.what());
  }
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

void criterion1_one_mode_norm_law() {
  const auto start = std::chrono::steady_clock::now();
  const double ks[] = {0.5, 0.8, 1.5, 2.0};
  const double deltas[] = {0.1, 0.5, 1.0};
  double worst_closed = 0.0, worst_oracle = 0.0;
  for (double k : ks) {
    // One eigensystem per k: the quadratic depends on k alone, m enters
    // only through the exponent coefficients.
    gc::fock::QuadEigensystem sys =
        gc::fock::quad_eigensystem(gc::fock::quad_operator(k, 60));
    const double g = std::abs(k * k - 1.0);
    for (double d : deltas) {
      const double m = 0.5 * g + d;
      const double closed = 1.0 / (m + 0.5 * g);
      gc::gauss::NormResult nr = gc::gauss::cj_norm(gc::gauss::one_mode_spec(k, m));
      worst_closed = std::max(worst_closed, std::abs(nr.value - closed));
      const double oracle = gc::fock::norm_from_eigensystem(sys, m);
      worst_oracle =
          std::max(worst_oracle, std::abs(oracle - closed) / closed);
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool pass =
      worst_closed <= 1e-12 && worst_oracle <= 1e-3 && secs < 120.0;
  record(1, pass,
         fmt("one-mode norm law (closed-form dev %.1e, oracle rel dev %.1e, "
             "%.1f s)",
             worst_closed, worst_oracle, secs));
}

void criterion2_ground_level() {
  double worst = 0.0;
  for (double k : {0.5, 2.0}) {
    gc::fock::QuadEigensystem sys =
        gc::fock::quad_eigensystem(gc::fock::quad_operator(k, 40));
    worst = std::max(worst,
                     std::abs(sys.min_eigenvalue - std::abs(k * k - 1.0)));
  }
  record(2, worst <= 1e-4,
         fmt("quadratic ground level matches the gap (max dev %.1e)", worst));
}

void criterion3_partial_trace() {
  const double d40 = gc::fock::verify_partial_trace(2.0, 3.0, 40, 5);
  const double d60 = gc::fock::verify_partial_trace(2.0, 3.0, 60, 5);
  const double d80 = gc::fock::verify_partial_trace(2.0, 3.0, 80, 5);
  const bool pass = d60 <= 5e-3 && d40 > d60 && d60 > d80;
  record(3, pass,
         fmt("identity marginal deviation %.2e / %.2e / %.2e at windows "
             "40/60/80, decreasing",
             d40, d60, d80));
}

void criterion4_williamson_contract() {
  testkit::Rng rng(2024);
  double worst_resid = 0.0;
  int bad_dims = 0, bad_identities = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int s = 1 + trial % 4;
    testkit::CanonicalPair pair = testkit::random_valid_pair(rng, s);
    gc::sympl::WilliamsonResult wr = gc::sympl::williamson(pair.mu, pair.dk);
    if (wr.d1 != pair.d1 || wr.d2 != pair.d2 || wr.d3 != pair.d3 ||
        wr.d4 != pair.d4)
      ++bad_dims;
    if (wr.d1 + wr.d2 != wr.r_dk ||
        wr.d1 + wr.d2 + wr.d3 + wr.d4 != 2 * s ||
        wr.r_c != wr.d1 + wr.d2 / 2 + wr.d3)
      ++bad_identities;
    const double mu_resid = gc::kernel::max_abs(gc::RMatrix(
        wr.t.transpose() * pair.mu * wr.t - testkit::canonical_mu(wr)));
    const double dk_resid = gc::kernel::max_abs(gc::RMatrix(
        wr.t.transpose() * pair.dk * wr.t - testkit::canonical_dk(wr)));
    worst_resid = std::max({worst_resid, mu_resid, dk_resid});
  }
  const bool pass = worst_resid <= 1e-8 && bad_dims == 0 && bad_identities == 0;
  record(4, pass,
         fmt("block forms on 200 random pairs (max residual %.1e, "
             "%.0f dim mismatches, %.0f identity failures)",
             worst_resid, double(bad_dims), double(bad_identities)));
}

void criterion5_eb_threshold() {
  const double ks[] = {0.3, 0.5, 0.8, 1.2, 1.5, 2.0, 2.5};
  bool flips_exact = true, norms_bounded = true;
  for (double k : ks) {
    const double m_star = 0.5 * (k * k + 1.0);
    gc::gauss::OneModeReport at = gc::gauss::one_mode_report(k, m_star);
    gc::gauss::OneModeReport below =
        gc::gauss::one_mode_report(k, std::nextafter(m_star, 0.0));
    if (!at.entanglement_breaking || below.entanglement_breaking)
      flips_exact = false;
    for (double extra : {0.0, 0.5, 2.0}) {
      gc::gauss::OneModeReport eb = gc::gauss::one_mode_report(k, m_star + extra);
      gc::gauss::NormResult nr =
          gc::gauss::cj_norm(gc::gauss::one_mode_spec(k, m_star + extra));
      if (!eb.entanglement_breaking || nr.value > 1.0 + 1e-12)
        norms_bounded = false;
    }
  }
  const double window_norm =
      gc::gauss::cj_norm(gc::gauss::one_mode_spec(2.0, 2.0)).value;
  const double window_dev = std::abs(window_norm - 1.0 / 3.5);
  const bool pass = flips_exact && norms_bounded && window_dev <= 1e-14;
  record(5, pass,
         fmt("EB verdict flips at (k^2+1)/2, EB norms <= 1 (k=2, m=2 norm "
             "dev %.1e)",
             window_dev));
}

void criterion6_cj_round_trips() {
  testkit::Rng rng(2025);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst_apply = 0.0, worst_jam = 0.0, worst_spec = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int da = 2 + trial % 5;              // up to 6
    const int db = 2 + (trial / 5) % 5;
    const int rank = 1 + trial % 3;
    gc::cj::ChoiMatrix choi = testkit::random_channel(rng, da, db, rank);
    gc::cj::KrausSet ks = gc::cj::kraus_from_choi(choi);
    gc::cj::DensityMatrix rho = testkit::random_density(rng, da);
    gc::cj::DensityMatrix via_choi = gc::cj::apply_channel(choi, rho);
    gc::cj::DensityMatrix via_kraus = gc::cj::apply_kraus(ks, rho);
    worst_apply = std::max(
        worst_apply,
        gc::kernel::max_abs(gc::Matrix(via_choi.rho - via_kraus.rho)));

    gc::RVector probs(da);
    for (int i = 0; i < da; ++i) probs(i) = 0.1 + u01(rng);
    probs /= probs.sum();
    gc::Matrix sigma = gc::Matrix::Zero(da, da);
    for (int i = 0; i < da; ++i) sigma(i, i) = probs(i);
    gc::cj::DensityMatrix jam =
        gc::cj::jam_state(choi, gc::cj::make_density(sigma));
    gc::cj::ChannelBlocks blocks = gc::cj::recover_blocks(jam, probs);
    gc::cj::ChoiMatrix rebuilt = gc::cj::choi_from_blocks(blocks);
    worst_jam = std::max(
        worst_jam, gc::kernel::max_abs(gc::Matrix(rebuilt.c - choi.c)));

    gc::Matrix u = testkit::random_unitary(rng, da);
    gc::cj::ChoiMatrix rot = gc::cj::basis_change(choi, u);
    gc::RVector s1 = gc::kernel::hermitian_eig(choi.c).values;
    gc::RVector s2 = gc::kernel::hermitian_eig(rot.c).values;
    worst_spec =
        std::max(worst_spec, (s1 - s2).cwiseAbs().maxCoeff());
  }
  const bool pass =
      worst_apply <= 1e-9 && worst_jam <= 1e-8 && worst_spec <= 1e-10;
  record(6, pass,
         fmt("round trips on 100 channels (apply dev %.1e, jam dev %.1e, "
             "spectrum dev %.1e)",
             worst_apply, worst_jam, worst_spec));
}

void criterion7_separable_bound() {
  testkit::Rng rng(2026);
  double worst_norm = 0.0, worst_ppt = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int da = 2 + trial % 4;              // up to 5
    const int db = 2 + (trial / 4) % 4;
    gc::eb::EbChannel ch = testkit::random_eb_channel(rng, da, db, da + 1);
    gc::cj::ChoiMatrix choi = gc::eb::separable_choi(ch);
    worst_norm = std::max(worst_norm, gc::kernel::max_eigenvalue(choi.c));
    worst_ppt = std::min(worst_ppt, gc::eb::ppt_min_eigenvalue(choi));
  }
  const bool pass = worst_norm <= 1.0 + 1e-10 && worst_ppt >= -1e-9;
  record(7, pass,
         fmt("separable Choi bound on 100 EB channels (max norm %.12f, "
             "min PT eigenvalue %.1e)",
             worst_norm, worst_ppt));
}

void criterion8_thermal_spectrum() {
  gc::fock::ThermalCheck unit = gc::fock::thermal_spectrum_check(1.0, 60);
  double worst_eig = 0.0;
  for (double mu : {0.75, 1.0, 5.0}) {
    gc::fock::ThermalCheck t = gc::fock::thermal_spectrum_check(mu, 60);
    worst_eig =
        std::max(worst_eig, std::abs(t.max_eigenvalue - 1.0 / (mu + 0.5)));
  }
  const bool pass = unit.max_deviation <= 1e-10 && worst_eig <= 1e-10;
  record(8, pass,
         fmt("thermal spectrum law (geometric dev %.1e over 30 levels, "
             "max-eigenvalue dev %.1e)",
             unit.max_deviation, worst_eig));
}

}  // namespace

int main() {
  run(1, "one-mode norm law", criterion1_one_mode_norm_law);
  run(2, "quadratic ground level", criterion2_ground_level);
  run(3, "identity marginal", criterion3_partial_trace);
  run(4, "block-form contract", criterion4_williamson_contract);
  run(5, "EB threshold", criterion5_eb_threshold);
  run(6, "CJ round trips", criterion6_cj_round_trips);
  run(7, "separable bound", criterion7_separable_bound);
  run(8, "thermal spectrum", criterion8_thermal_spectrum);
  std::printf("%s\n", g_all_pass ? "acceptance: all criteria passed"
                                 : "acceptance: FAILURES PRESENT");
  return g_all_pass ? 0 : 1;
}
