// Command-line front end: channel spec ingestion, closed-form analysis, and
// Fock-oracle verification.  Exit codes: 0 success, 1 parse or usage error,
// 2 mathematically invalid input, 3 verification failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gausscj/gausscj.hpp"

namespace gc = gausscj;

namespace {

// Fixed oracle acceptance thresholds, echoed in every verify report.
constexpr double kEigTol = 1e-4;
constexpr double kNormRtol = 1e-3;
constexpr double kPtraceTol = 5e-3;
// Truncation leaks tiny negatives through the exponential edge, so the
// truncated probe floor sits far above the exact-arithmetic -1e-9.
constexpr double kPptFloor = -1e-3;
constexpr double kProbeNbar = 1.0;
constexpr int kProbeTruncCap = 25;

int exit_code_for(gc::errc c) {
  switch (c) {
    case gc::errc::parse_error:
    case gc::errc::io_error:
    case gc::errc::truncation_too_small:
      return 1;
    default:
      return 2;
  }
}

std::string hfmt(double v) {
  char b[40];
  std::snprintf(b, sizeof(b), "%.6g", v);
  return std::string(b);
}

struct CommonOpts {
  std::string format = "human";
  double tol_rank = 0.0;
  double tol_psd = 0.0;
  CLI::Option* rank_opt = nullptr;
  CLI::Option* psd_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"human", "machine"}))
        ->capture_default_str();
    rank_opt = cmd->add_option("--tol-rank", tol_rank,
                               "Relative singular-value cutoff for ranks")
                   ->envname("GAUSSCJ_TOL_RANK");
    psd_opt = cmd->add_option("--tol-psd", tol_psd,
                              "Slack allowed below zero in PSD checks")
                  ->envname("GAUSSCJ_TOL_PSD");
  }

  bool machine() const { return format == "machine"; }

  gc::Tolerances tolerances() const {
    gc::Tolerances tol;
    if (rank_opt != nullptr && rank_opt->count() > 0) {
      tol.rank = tol_rank;
      tol.rank_recheck = 10.0 * tol_rank;
    }
    if (psd_opt != nullptr && psd_opt->count() > 0) tol.psd = tol_psd;
    return tol;
  }
};

void echo_tolerances(gc::io::MachineReport& r, const gc::Tolerances& t) {
  r.add("tolerance.hermiticity", t.hermiticity);
  r.add("tolerance.psd", t.psd);
  r.add("tolerance.trace", t.trace);
  r.add("tolerance.rank", t.rank);
  r.add("tolerance.rank_recheck", t.rank_recheck);
  r.add("tolerance.pure_window", t.pure_window);
  r.add("tolerance.kraus_drop", t.kraus_drop);
  r.add("tolerance.kraus_complete", t.kraus_complete);
  r.add("tolerance.unitary", t.unitary);
  r.add("tolerance.sigma_floor", t.sigma_floor);
}

// Reports carry the EB verdict only for the isotropic one-mode family, the
// one shape with a closed-form threshold.
bool isotropic_one_mode(const gc::sympl::GaussianChannelSpec& g, double* k,
                        double* m) {
  if (g.s_a != 1 || g.s_b != 1) return false;
  const double kk = g.k(0, 0);
  const double mm = g.mu(0, 0);
  if (kk < 0.0 || mm < 0.0) return false;
  const gc::RMatrix i2 = gc::RMatrix::Identity(2, 2);
  if (gc::kernel::max_abs(gc::RMatrix(g.k - kk * i2)) >
      1e-12 * (1.0 + std::abs(kk)))
    return false;
  if (gc::kernel::max_abs(gc::RMatrix(g.mu - mm * i2)) >
      1e-12 * (1.0 + std::abs(mm)))
    return false;
  *k = kk;
  *m = mm;
  return true;
}

void add_one_mode_fields(gc::io::MachineReport& r, const std::string& prefix,
                         const gc::gauss::OneModeReport& rep) {
  r.add(prefix + "k", rep.k);
  r.add(prefix + "m", rep.m);
  r.add(prefix + "gap", rep.gap);
  r.add(prefix + "validity_margin", rep.validity_margin);
  if (rep.gap > 0.0) r.add(prefix + "mu1", rep.mu1);
  r.add(prefix + "case", gc::gauss::to_string(rep.cj_case));
  r.add(prefix + "norm.kind", gc::gauss::to_string(rep.norm_kind));
  if (rep.norm_kind != gc::gauss::NormKind::unbounded)
    r.add(prefix + "norm.value", rep.norm_value);
  r.add(prefix + "eb", rep.entanglement_breaking);
  r.add(prefix + "eb_threshold", 0.5 * (rep.k * rep.k + 1.0));
  r.add(prefix + "norm_at_most_one", rep.norm_at_most_one);
  if (rep.cj_case == gc::gauss::CjCase::case1)
    r.add(prefix + "lambda_coeff", rep.lambda_coeff);
  if (rep.cj_case == gc::gauss::CjCase::case2)
    r.add(prefix + "case2_eigenvalue", rep.case2_eigenvalue);
}

void print_one_mode_human(const gc::gauss::OneModeReport& rep) {
  std::cout << "one-mode channel: k = " << hfmt(rep.k) << ", m = "
            << hfmt(rep.m) << "\n";
  std::cout << "  validity margin m - |k^2-1|/2: " << hfmt(rep.validity_margin)
            << "\n";
  if (rep.gap > 0.0)
    std::cout << "  normal-mode eigenvalue mu_1: " << hfmt(rep.mu1) << "\n";
  std::cout << "  case: " << gc::gauss::to_string(rep.cj_case) << "\n";
  if (rep.norm_kind == gc::gauss::NormKind::unbounded)
    std::cout << "  CJ norm: unbounded\n";
  else
    std::cout << "  CJ norm: " << gc::gauss::to_string(rep.norm_kind) << " "
              << hfmt(rep.norm_value) << "\n";
  std::cout << "  entanglement breaking: "
            << (rep.entanglement_breaking ? "yes" : "no") << " (threshold m >= "
            << hfmt(0.5 * (rep.k * rep.k + 1.0)) << ")\n";
  std::cout << "  norm <= 1: " << (rep.norm_at_most_one ? "yes" : "no") << "\n";
  if (rep.cj_case == gc::gauss::CjCase::case1)
    std::cout << "  exponent coefficient lambda: " << hfmt(rep.lambda_coeff)
              << "\n";
  if (rep.cj_case == gc::gauss::CjCase::case2)
    std::cout << "  oscillator ground eigenvalue: "
              << hfmt(rep.case2_eigenvalue) << "\n";
}

int cmd_analyze(const std::string& path, const CommonOpts& opts) {
  const gc::Tolerances tol = opts.tolerances();
  gc::io::ChannelSpecFile sf = gc::io::parse_spec_path(path);
  gc::io::MachineReport r;
  r.add("command", "analyze");
  r.add("input.file", path);
  echo_tolerances(r, tol);

  if (sf.kind == gc::io::SpecKind::gaussian) {
    const gc::sympl::GaussianChannelSpec& g = sf.gauss;
    r.add("input.kind", "gaussian");
    r.add("input.s_a", g.s_a);
    r.add("input.s_b", g.s_b);
    const double margin = gc::sympl::validate_spec(g, tol);
    r.add("validity.margin", margin);
    gc::sympl::WilliamsonResult wr = gc::sympl::williamson(g, tol);
    r.add("rank.mu", wr.r_mu);
    r.add("rank.delta_k", wr.r_dk);
    r.add("rank.c", wr.r_c);
    gc::gauss::CjClassification cls = gc::gauss::classify(g, tol);
    r.add("dims.d1", cls.d1);
    r.add("dims.d2", cls.d2);
    r.add("dims.d3", cls.d3);
    r.add("dims.d4", cls.d4);
    r.add("case", gc::gauss::to_string(cls.primary));
    r.add("bounded", cls.bounded);
    gc::gauss::NormResult norm = gc::gauss::cj_norm(g, tol);
    r.add("norm.kind", gc::gauss::to_string(norm.kind));
    if (norm.kind != gc::gauss::NormKind::unbounded)
      r.add("norm.value", norm.value);
    r.add("modes.count", static_cast<int>(cls.modes.size()));
    for (size_t j = 0; j < cls.modes.size(); ++j) {
      const std::string p = "modes." + std::to_string(j) + ".";
      r.add(p + "sympl_eig", cls.modes[j].sympl_eig);
      r.add(p + "pure", cls.modes[j].pure);
    }
    double k1 = 0.0, m1 = 0.0;
    gc::gauss::OneModeReport omr;
    const bool iso = isotropic_one_mode(g, &k1, &m1);
    r.add("one_mode.applicable", iso);
    if (iso) {
      omr = gc::gauss::one_mode_report(k1, m1, tol);
      add_one_mode_fields(r, "one_mode.", omr);
    }

    if (opts.machine()) {
      std::cout << r.str();
    } else {
      std::cout << "gaussian channel: s_a = " << g.s_a << ", s_b = " << g.s_b
                << " (" << path << ")\n";
      std::cout << "  validity margin: " << hfmt(margin) << "\n";
      std::cout << "  noise dims (d1, d2, d3, d4): (" << cls.d1 << ", "
                << cls.d2 << ", " << cls.d3 << ", " << cls.d4 << ")\n";
      std::cout << "  case: " << gc::gauss::to_string(cls.primary)
                << (cls.bounded ? " (bounded)" : " (unbounded)") << "\n";
      if (norm.kind == gc::gauss::NormKind::unbounded)
        std::cout << "  CJ norm: unbounded\n";
      else
        std::cout << "  CJ norm: " << gc::gauss::to_string(norm.kind) << " "
                  << hfmt(norm.value) << "\n";
      for (size_t j = 0; j < cls.modes.size(); ++j)
        std::cout << "  mode " << j << ": mu = "
                  << hfmt(cls.modes[j].sympl_eig)
                  << (cls.modes[j].pure ? " (pure)" : "") << "\n";
      if (iso) {
        std::cout << "  isotropic one-mode family detected:\n";
        print_one_mode_human(omr);
      }
    }
    return 0;
  }

  // Finite-dimensional branch.
  r.add("input.kind", "finite");
  r.add("input.d_a", sf.d_a);
  r.add("input.d_b", sf.d_b);
  gc::cj::ChoiMatrix choi =
      sf.has_choi
          ? gc::cj::make_choi(sf.choi, sf.d_a, sf.d_b, tol)
          : gc::cj::choi_from_kraus(
                gc::cj::KrausSet{sf.d_a, sf.d_b, sf.kraus}, tol);
  const double lo = gc::kernel::min_eigenvalue(choi.c, tol);
  const double hi = gc::kernel::max_eigenvalue(choi.c, tol);
  const double tr = choi.c.trace().real();
  const double ppt = gc::eb::ppt_min_eigenvalue(choi, tol);
  gc::cj::KrausSet ks = gc::cj::kraus_from_choi(choi, tol);
  r.add("choi.trace", tr);
  r.add("choi.min_eigenvalue", lo);
  r.add("norm.kind", "exact");
  r.add("norm.value", hi);
  r.add("ppt.min_eigenvalue", ppt);
  r.add("kraus.count", static_cast<int>(ks.ops.size()));

  if (opts.machine()) {
    std::cout << r.str();
  } else {
    std::cout << "finite channel: d_a = " << sf.d_a << ", d_b = " << sf.d_b
              << " (" << path << ")\n";
    std::cout << "  Choi trace: " << hfmt(tr) << ", min eigenvalue "
              << hfmt(lo) << "\n";
    std::cout << "  CJ norm: exact " << hfmt(hi) << "\n";
    std::cout << "  partial-transpose min eigenvalue: " << hfmt(ppt)
              << (ppt >= -tol.psd ? " (PPT)" : " (NPT)") << "\n";
    std::cout << "  Kraus rank: " << ks.ops.size() << "\n";
  }
  return 0;
}

int cmd_one_mode(double k, double m, const CommonOpts& opts) {
  const gc::Tolerances tol = opts.tolerances();
  gc::gauss::OneModeReport rep = gc::gauss::one_mode_report(k, m, tol);
  if (opts.machine()) {
    gc::io::MachineReport r;
    r.add("command", "one-mode");
    echo_tolerances(r, tol);
    add_one_mode_fields(r, "", rep);
    std::cout << r.str();
  } else {
    print_one_mode_human(rep);
  }
  return 0;
}

int cmd_verify(double k, double m, int trunc, int levels,
               const CommonOpts& opts) {
  const gc::Tolerances tol = opts.tolerances();
  gc::gauss::OneModeReport rep = gc::gauss::one_mode_report(k, m, tol);
  if (rep.cj_case != gc::gauss::CjCase::case1 &&
      rep.cj_case != gc::gauss::CjCase::case2)
    gc::fail(gc::errc::not_case1,
             "verify: the k = 1 family has no oracle route");

  gc::fock::QuadEigensystem sys =
      gc::fock::quad_eigensystem(gc::fock::quad_operator(k, trunc));

  gc::io::MachineReport r;
  r.add("command", "verify");
  r.add("input.k", k);
  r.add("input.m", m);
  r.add("input.trunc", trunc);
  r.add("input.levels", levels);
  echo_tolerances(r, tol);
  r.add("case", gc::gauss::to_string(rep.cj_case));
  r.add("oracle.blocked", sys.blocked);

  bool all_pass = true;

  const double eig_dev = std::abs(sys.min_eigenvalue - rep.gap);
  const bool eig_pass = eig_dev <= kEigTol;
  all_pass = all_pass && eig_pass;
  r.add("check.eigenvalue.value", sys.min_eigenvalue);
  r.add("check.eigenvalue.expected", rep.gap);
  r.add("check.eigenvalue.deviation", eig_dev);
  r.add("check.eigenvalue.tolerance", kEigTol);
  r.add("check.eigenvalue.pass", eig_pass);

  double oracle_norm = 0.0, norm_rel = 0.0, pt_dev = 0.0, ppt = 0.0;
  bool norm_pass = true, pt_pass = true, ppt_pass = true, ppt_required = false;
  int probe_trunc = 0;
  if (rep.cj_case == gc::gauss::CjCase::case1) {
    oracle_norm = gc::fock::norm_from_eigensystem(sys, m, tol);
    norm_rel = std::abs(oracle_norm - rep.norm_value) / rep.norm_value;
    norm_pass = norm_rel <= kNormRtol;
    all_pass = all_pass && norm_pass;
    r.add("check.norm.closed_form", rep.norm_value);
    r.add("check.norm.oracle", oracle_norm);
    r.add("check.norm.rel_deviation", norm_rel);
    r.add("check.norm.tolerance", kNormRtol);
    r.add("check.norm.pass", norm_pass);

    // The 5e-3 window-tail contract holds from truncation 60 upward; below
    // that the deviation is dominated by genuine tail mass and is reported
    // without gating.
    const bool pt_required = trunc >= 60;
    pt_dev = gc::fock::verify_partial_trace(k, m, trunc, levels, tol);
    pt_pass = !pt_required || pt_dev <= kPtraceTol;
    all_pass = all_pass && pt_pass;
    r.add("check.partial_trace.deviation", pt_dev);
    r.add("check.partial_trace.tolerance", kPtraceTol);
    r.add("check.partial_trace.required", pt_required);
    r.add("check.partial_trace.pass", pt_pass);

    probe_trunc = std::min(trunc, kProbeTruncCap);
    ppt = gc::fock::ppt_probe_truncated(k, m, kProbeNbar, probe_trunc, tol);
    ppt_required = rep.entanglement_breaking;
    ppt_pass = !ppt_required || ppt >= kPptFloor;
    all_pass = all_pass && ppt_pass;
    r.add("probe.ppt.trunc", probe_trunc);
    r.add("probe.ppt.nbar", kProbeNbar);
    r.add("probe.ppt.min_eigenvalue", ppt);
    r.add("probe.ppt.floor", kPptFloor);
    r.add("probe.ppt.required", ppt_required);
    r.add("probe.ppt.pass", ppt_pass);
  }
  r.add("verdict", all_pass ? "pass" : "fail");

  if (opts.machine()) {
    std::cout << r.str();
  } else {
    std::cout << "verify k = " << hfmt(k) << ", m = " << hfmt(m) << " (case "
              << gc::gauss::to_string(rep.cj_case) << "), truncation "
              << trunc << (sys.blocked ? " [blocked]" : " [dense]") << "\n";
    std::cout << "  lowest eigenvalue " << hfmt(sys.min_eigenvalue) << " vs "
              << hfmt(rep.gap) << " (dev " << hfmt(eig_dev) << " <= "
              << hfmt(kEigTol) << "): " << (eig_pass ? "PASS" : "FAIL")
              << "\n";
    if (rep.cj_case == gc::gauss::CjCase::case1) {
      std::cout << "  norm oracle " << hfmt(oracle_norm)
                << " vs closed form " << hfmt(rep.norm_value) << " (rel dev "
                << hfmt(norm_rel) << " <= " << hfmt(kNormRtol)
                << "): " << (norm_pass ? "PASS" : "FAIL") << "\n";
      std::cout << "  partial trace deviation " << hfmt(pt_dev) << " on "
                << levels << " levels ("
                << (trunc >= 60 ? "<= " + hfmt(kPtraceTol)
                                : "informational below truncation 60")
                << "): " << (pt_pass ? "PASS" : "FAIL") << "\n";
      std::cout << "  ppt probe (trunc " << probe_trunc << ", nbar "
                << hfmt(kProbeNbar) << "): min eigenvalue " << hfmt(ppt)
                << (ppt_required ? " (required >= " + hfmt(kPptFloor) + "): "
                                 : " (informational): ")
                << (ppt_pass ? "PASS" : "FAIL") << "\n";
    }
    std::cout << "verdict: " << (all_pass ? "PASS" : "FAIL") << "\n";
  }
  return all_pass ? 0 : 3;
}

int cmd_kraus(const std::string& path, const std::string& out_path,
              const CommonOpts& opts) {
  const gc::Tolerances tol = opts.tolerances();
  gc::io::ChannelSpecFile sf = gc::io::parse_spec_path(path);
  if (sf.kind != gc::io::SpecKind::finite) {
    std::cerr << "error: kraus requires a finite-kind spec file\n";
    return 1;
  }
  gc::cj::ChoiMatrix choi =
      sf.has_choi
          ? gc::cj::make_choi(sf.choi, sf.d_a, sf.d_b, tol)
          : gc::cj::choi_from_kraus(
                gc::cj::KrausSet{sf.d_a, sf.d_b, sf.kraus}, tol);
  gc::cj::KrausSet ks = gc::cj::kraus_from_choi(choi, tol);
  gc::Matrix comp = gc::Matrix::Zero(ks.d_a, ks.d_a);
  for (const gc::Matrix& v : ks.ops) comp += v.adjoint() * v;
  comp -= gc::Matrix::Identity(ks.d_a, ks.d_a);
  const double residual = gc::kernel::max_abs(comp);

  std::ofstream out(out_path);
  if (!out) gc::fail(gc::errc::io_error, "cannot open '" + out_path + "'");
  out << gc::io::write_finite_kraus_spec(ks);
  if (!out.flush())
    gc::fail(gc::errc::io_error, "write failed on '" + out_path + "'");

  if (opts.machine()) {
    gc::io::MachineReport r;
    r.add("command", "kraus");
    r.add("input.file", path);
    r.add("input.d_a", sf.d_a);
    r.add("input.d_b", sf.d_b);
    echo_tolerances(r, tol);
    r.add("kraus.count", static_cast<int>(ks.ops.size()));
    r.add("kraus.completeness_residual", residual);
    r.add("out", out_path);
    std::cout << r.str();
  } else {
    std::cout << "kraus extraction: " << ks.ops.size() << " operators (d_b = "
              << ks.d_b << ", d_a = " << ks.d_a << ")\n";
    std::cout << "  completeness residual: " << hfmt(residual) << "\n";
    std::cout << "  written to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Choi-Jamiolkowski calculus for finite and Gaussian channels"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand(
      "analyze", "Classify a channel spec file and report norms");
  std::string analyze_path;
  analyze->add_option("file", analyze_path, "Channel spec file")->required();
  CommonOpts aopts;
  aopts.attach(analyze);

  auto* onemode = app.add_subcommand(
      "one-mode", "Closed-form report for the isotropic one-mode family");
  double om_k = 0.0, om_m = 0.0;
  onemode->add_option("--k", om_k, "Gain parameter")->required();
  onemode->add_option("--m", om_m, "Noise parameter")->required();
  CommonOpts oopts;
  oopts.attach(onemode);

  auto* verify = app.add_subcommand(
      "verify", "Check one-mode closed forms against the Fock oracle");
  double v_k = 0.0, v_m = 0.0;
  int v_trunc = 40, v_levels = 5;
  verify->add_option("--k", v_k, "Gain parameter")->required();
  verify->add_option("--m", v_m, "Noise parameter")->required();
  verify->add_option("--trunc", v_trunc, "Fock truncation")
      ->capture_default_str();
  verify->add_option("--levels", v_levels, "Partial-trace levels checked")
      ->capture_default_str();
  CommonOpts vopts;
  vopts.attach(verify);

  auto* kraus = app.add_subcommand(
      "kraus", "Extract Kraus operators from a finite spec file");
  std::string kraus_path, kraus_out;
  kraus->add_option("file", kraus_path, "Channel spec file")->required();
  kraus->add_option("--out", kraus_out, "Output spec file")->required();
  CommonOpts kopts;
  kopts.attach(kraus);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_path, aopts);
    if (onemode->parsed()) return cmd_one_mode(om_k, om_m, oopts);
    if (verify->parsed()) return cmd_verify(v_k, v_m, v_trunc, v_levels, vopts);
    if (kraus->parsed()) return cmd_kraus(kraus_path, kraus_out, kopts);
  } catch (const gc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
