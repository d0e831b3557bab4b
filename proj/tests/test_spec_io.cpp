#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "testkit.hpp"

namespace gc = gausscj;
using gc::Matrix;
using gc::RMatrix;
using testkit::error_code_of;

namespace {

std::string sample(const char* name) {
  return std::string(SAMPLES_DIR) + "/" + name;
}

// Message text of the parse error raised by f.
template <typename F>
std::string parse_message(F&& f) {
  try {
    f();
  } catch (const gc::error& e) {
    REQUIRE(e.code() == gc::errc::parse_error);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_CASE("sample specs parse to the documented channels") {
  gc::io::ChannelSpecFile amp =
      gc::io::parse_spec_path(sample("one_mode_amplifier.spec"));
  CHECK(amp.kind == gc::io::SpecKind::gaussian);
  CHECK(amp.gauss.s_a == 1);
  CHECK(amp.gauss.s_b == 1);
  CHECK(gc::kernel::max_abs(RMatrix(amp.gauss.k -
                                    2.0 * RMatrix::Identity(2, 2))) == 0.0);
  CHECK(gc::kernel::max_abs(RMatrix(amp.gauss.mu -
                                    3.0 * RMatrix::Identity(2, 2))) == 0.0);

  gc::io::ChannelSpecFile mixed =
      gc::io::parse_spec_path(sample("two_mode_mixed.spec"));
  CHECK(mixed.gauss.s_b == 2);
  CHECK(mixed.gauss.mu(3, 3) == 4.5);

  gc::io::ChannelSpecFile ident =
      gc::io::parse_spec_path(sample("identity_qubit.spec"));
  CHECK(ident.kind == gc::io::SpecKind::finite);
  REQUIRE(ident.has_choi);
  CHECK(ident.choi(0, 0).real() == 1.0);
  CHECK(ident.choi(0, 3).real() == 1.0);
  CHECK(ident.choi(1, 1) == gc::Complex(0.0, 0.0));
  CHECK_NOTHROW(gc::cj::make_choi(ident.choi, ident.d_a, ident.d_b));

  gc::io::ChannelSpecFile transp =
      gc::io::parse_spec_path(sample("transpose_qubit.spec"));
  REQUIRE(transp.has_choi);
  CHECK(error_code_of([&] {
          gc::cj::make_choi(transp.choi, transp.d_a, transp.d_b);
        }) == gc::errc::not_completely_positive);

  gc::io::ChannelSpecFile depol =
      gc::io::parse_spec_path(sample("depolarizing_qubit.spec"));
  REQUIRE(depol.has_choi);
  CHECK(gc::kernel::max_abs(Matrix(depol.choi -
                                   0.5 * Matrix::Identity(4, 4))) == 0.0);
}

TEST_CASE("parse errors carry line numbers") {
  const std::string bad_int =
      "gausscj-spec 1\nkind gaussian\ns_a x\n";
  std::string msg =
      parse_message([&] { gc::io::parse_spec_text(bad_int); });
  CHECK(msg.find("line 3") != std::string::npos);

  const std::string bad_header = "gausscj-spec 2\n";
  msg = parse_message([&] { gc::io::parse_spec_text(bad_header); });
  CHECK(msg.find("line 1") != std::string::npos);
  CHECK(msg.find("version") != std::string::npos);

  const std::string bad_kind = "gausscj-spec 1\nkind banana\n";
  msg = parse_message([&] { gc::io::parse_spec_text(bad_kind); });
  CHECK(msg.find("line 2") != std::string::npos);

  // Comments and blank lines do not shift the reported numbers.
  const std::string with_comments =
      "# preamble\n\ngausscj-spec 1\nkind gaussian\n# note\ns_a 1\ns_b 1\n"
      "K 2 2\n1 0\n0 oops\n";
  msg = parse_message([&] { gc::io::parse_spec_text(with_comments); });
  CHECK(msg.find("line 10") != std::string::npos);

  msg = parse_message([&] { gc::io::parse_spec_text("gausscj-spec 1\n"); });
  CHECK(msg.find("unexpected end of file") != std::string::npos);
}

TEST_CASE("parser enforces shapes, symmetry, and exact section order") {
  const std::string asym =
      "gausscj-spec 1\nkind gaussian\ns_a 1\ns_b 1\n"
      "K 2 2\n1 0\n0 1\nmu 2 2\n1 0.5\n0 1\n";
  CHECK(error_code_of([&] { gc::io::parse_spec_text(asym); }) ==
        gc::errc::parse_error);

  const std::string wrong_shape =
      "gausscj-spec 1\nkind gaussian\ns_a 1\ns_b 2\nK 2 2\n1 0\n0 1\n";
  CHECK(error_code_of([&] { gc::io::parse_spec_text(wrong_shape); }) ==
        gc::errc::parse_error);

  const std::string trailing =
      "gausscj-spec 1\nkind finite\nd_a 1\nd_b 1\nchoi 1 1\n1\n0\nextra\n";
  std::string msg = parse_message([&] { gc::io::parse_spec_text(trailing); });
  CHECK(msg.find("trailing") != std::string::npos);

  const std::string short_row =
      "gausscj-spec 1\nkind gaussian\ns_a 1\ns_b 1\nK 2 2\n1\n";
  CHECK(error_code_of([&] { gc::io::parse_spec_text(short_row); }) ==
        gc::errc::parse_error);

  CHECK(error_code_of([] {
          gc::io::parse_spec_path("/nonexistent/channel.spec");
        }) == gc::errc::io_error);
}

TEST_CASE("spec writers round-trip bitwise through the parser") {
  testkit::Rng rng(107);

  gc::sympl::GaussianChannelSpec g;
  g.s_a = 2;
  g.s_b = 1;
  g.k = testkit::random_real(rng, 4, 2);
  RMatrix m = testkit::random_real(rng, 2, 2);
  g.mu = m + m.transpose() + 4.0 * RMatrix::Identity(2, 2);
  const std::string text = gc::io::write_gaussian_spec(g);
  gc::io::ChannelSpecFile back = gc::io::parse_spec_text(text);
  CHECK(gc::kernel::max_abs(RMatrix(back.gauss.k - g.k)) == 0.0);
  CHECK(gc::kernel::max_abs(RMatrix(back.gauss.mu - g.mu)) == 0.0);
  CHECK(gc::io::write_gaussian_spec(back.gauss) == text);

  gc::cj::ChoiMatrix choi = testkit::random_channel(rng, 2, 3, 2);
  const std::string ct = gc::io::write_finite_choi_spec(choi);
  gc::io::ChannelSpecFile cback = gc::io::parse_spec_text(ct);
  REQUIRE(cback.has_choi);
  CHECK(gc::kernel::max_abs(Matrix(cback.choi - choi.c)) == 0.0);
  CHECK(gc::io::write_finite_choi_spec(
            gc::cj::ChoiMatrix{cback.d_a, cback.d_b, cback.choi}) == ct);

  gc::cj::KrausSet ks = testkit::random_kraus(rng, 3, 2, 3);
  const std::string kt = gc::io::write_finite_kraus_spec(ks);
  gc::io::ChannelSpecFile kback = gc::io::parse_spec_text(kt);
  REQUIRE(kback.has_kraus);
  REQUIRE(kback.kraus.size() == ks.ops.size());
  for (size_t i = 0; i < ks.ops.size(); ++i)
    CHECK(gc::kernel::max_abs(Matrix(kback.kraus[i] - ks.ops[i])) == 0.0);
}

TEST_CASE("float formatting is fixed-width scientific") {
  CHECK(gc::io::format_double(0.5) == "5.0000000000000000e-01");
  CHECK(gc::io::format_double(-1.0) == "-1.0000000000000000e+00");
  CHECK(gc::io::format_double(0.0) == "0.0000000000000000e+00");
  // 17 significant digits reproduce any double exactly.
  const double v = 0.1 + 0.2;
  CHECK(std::stod(gc::io::format_double(v)) == v);
}

TEST_CASE("machine reports are deterministic key-value text") {
  gc::io::MachineReport rep;
  rep.add("norm.value", 0.5);
  rep.add("case", "1");
  rep.add("modes", 2);
  rep.add("valid", true);
  CHECK(rep.str() ==
        "gausscj-report 1\n"
        "norm.value 5.0000000000000000e-01\n"
        "case 1\n"
        "modes 2\n"
        "valid true\n");

  gc::io::MachineReport again;
  again.add("norm.value", 0.5);
  again.add("case", "1");
  again.add("modes", 2);
  again.add("valid", true);
  CHECK(rep.str() == again.str());
}
