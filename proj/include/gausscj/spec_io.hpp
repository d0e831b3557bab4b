#ifndef GAUSSCJ_SPEC_IO_HPP
#define GAUSSCJ_SPEC_IO_HPP

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gausscj/cj_core.hpp"
#include "gausscj/symplectic.hpp"
#include "gausscj/types.hpp"

// Versioned line-oriented text format for channel specifications and machine
// reports.  '#' starts a comment, blank lines are skipped, sections appear in
// a fixed order so that identical inputs always tokenize identically.
//
//   gausscj-spec 1
//   kind gaussian            | kind finite
//   s_a <int>                | d_a <int>
//   s_b <int>                | d_b <int>
//   K <2s_a> <2s_b>          | choi <d> <d>        (d = d_a * d_b)
//   <row-major reals>        |   <row re> / <row im> interleaved
//   mu <2s_b> <2s_b>         | kraus <count> <d_b> <d_a>
//   <row-major reals>        |   per operator: <row re> / <row im> interleaved
//
// Machine reports are "gausscj-report 1" followed by `key value` lines with
// floats printed as %.16e (17 significant digits), so equal runs are
// byte-identical.

namespace gausscj {
namespace io {

enum class SpecKind { gaussian, finite };

struct ChannelSpecFile {
  int schema_version = 1;
  SpecKind kind = SpecKind::gaussian;
  sympl::GaussianChannelSpec gauss;  // kind == gaussian
  int d_a = 0;                       // kind == finite
  int d_b = 0;
  bool has_choi = false;
  Matrix choi;  // raw entries; CP/TP validation happens downstream
  bool has_kraus = false;
  std::vector<Matrix> kraus;
};

inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return std::string(buf);
}

namespace detail {

struct TokenLine {
  int lineno = 0;
  std::vector<std::string> tokens;
};

struct TokenStream {
  std::vector<TokenLine> rows;
  size_t pos = 0;
  int last_lineno = 0;

  bool done() const { return pos >= rows.size(); }
  const TokenLine& take() {
    const TokenLine& t = rows[pos++];
    last_lineno = t.lineno;
    return t;
  }
};

[[noreturn]] inline void parse_fail(int lineno, const std::string& msg) {
  std::ostringstream os;
  os << "line " << lineno << ": " << msg;
  fail(errc::parse_error, os.str());
}

inline TokenStream tokenize(std::istream& in) {
  TokenStream out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    TokenLine row;
    row.lineno = lineno;
    std::string tok;
    while (ls >> tok) row.tokens.push_back(std::move(tok));
    if (!row.tokens.empty()) out.rows.push_back(std::move(row));
  }
  out.last_lineno = lineno;
  return out;
}

inline double to_double(const std::string& s, int lineno) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    parse_fail(lineno, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v))
    parse_fail(lineno, "expected a finite number, got '" + s + "'");
  return v;
}

inline int to_int(const std::string& s, int lineno) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    parse_fail(lineno, "expected an integer, got '" + s + "'");
  }
  if (used != s.size() || v < -1000000 || v > 1000000)
    parse_fail(lineno, "expected a small integer, got '" + s + "'");
  return static_cast<int>(v);
}

inline const TokenLine& expect_line(TokenStream& ts, const std::string& what) {
  if (ts.done())
    parse_fail(ts.last_lineno, "unexpected end of file, expected " + what);
  return ts.take();
}

inline int expect_keyed_int(TokenStream& ts, const std::string& key) {
  const TokenLine& t = expect_line(ts, "'" + key + " <int>'");
  if (t.tokens.size() != 2 || t.tokens[0] != key)
    parse_fail(t.lineno, "expected '" + key + " <int>'");
  return to_int(t.tokens[1], t.lineno);
}

inline RVector expect_number_row(TokenStream& ts, Eigen::Index cols,
                                 const std::string& what) {
  const TokenLine& t = expect_line(ts, what);
  if (static_cast<Eigen::Index>(t.tokens.size()) != cols)
    parse_fail(t.lineno, what + ": expected " + std::to_string(cols) +
                             " numbers, got " +
                             std::to_string(t.tokens.size()));
  RVector row(cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    row(c) = to_double(t.tokens[static_cast<size_t>(c)], t.lineno);
  return row;
}

inline RMatrix read_real_matrix(TokenStream& ts, Eigen::Index rows,
                                Eigen::Index cols, const std::string& name) {
  RMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    m.row(r) = expect_number_row(ts, cols, name + " row").transpose();
  return m;
}

inline Matrix read_complex_matrix(TokenStream& ts, Eigen::Index rows,
                                  Eigen::Index cols, const std::string& name) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    RVector re = expect_number_row(ts, cols, name + " row (real part)");
    RVector im = expect_number_row(ts, cols, name + " row (imag part)");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex(re(c), im(c));
  }
  return m;
}

}  // namespace detail

inline ChannelSpecFile parse_spec(std::istream& in) {
  using namespace detail;
  TokenStream ts = tokenize(in);

  const TokenLine& head = expect_line(ts, "'gausscj-spec 1' header");
  if (head.tokens.size() != 2 || head.tokens[0] != "gausscj-spec")
    parse_fail(head.lineno, "expected 'gausscj-spec <version>' header");
  if (head.tokens[1] != "1")
    parse_fail(head.lineno,
               "unsupported schema version '" + head.tokens[1] + "'");

  ChannelSpecFile spec;
  const TokenLine& kind = expect_line(ts, "'kind gaussian|finite'");
  if (kind.tokens.size() != 2 || kind.tokens[0] != "kind")
    parse_fail(kind.lineno, "expected 'kind gaussian|finite'");

  if (kind.tokens[1] == "gaussian") {
    spec.kind = SpecKind::gaussian;
    const int s_a = expect_keyed_int(ts, "s_a");
    const int s_b = expect_keyed_int(ts, "s_b");
    if (s_a < 1 || s_b < 1)
      parse_fail(ts.last_lineno, "mode counts must be >= 1");

    const TokenLine& kh = expect_line(ts, "'K <rows> <cols>'");
    if (kh.tokens.size() != 3 || kh.tokens[0] != "K")
      parse_fail(kh.lineno, "expected 'K <rows> <cols>'");
    const int kr = to_int(kh.tokens[1], kh.lineno);
    const int kc = to_int(kh.tokens[2], kh.lineno);
    if (kr != 2 * s_a || kc != 2 * s_b)
      parse_fail(kh.lineno, "K must be 2*s_a by 2*s_b");
    RMatrix kmat = read_real_matrix(ts, kr, kc, "K");

    const TokenLine& mh = expect_line(ts, "'mu <rows> <cols>'");
    if (mh.tokens.size() != 3 || mh.tokens[0] != "mu")
      parse_fail(mh.lineno, "expected 'mu <rows> <cols>'");
    const int mr = to_int(mh.tokens[1], mh.lineno);
    const int mc = to_int(mh.tokens[2], mh.lineno);
    if (mr != 2 * s_b || mc != 2 * s_b)
      parse_fail(mh.lineno, "mu must be 2*s_b by 2*s_b");
    RMatrix mu = read_real_matrix(ts, mr, mc, "mu");
    if (kernel::max_abs(RMatrix(mu - mu.transpose())) >
        1e-10 * (1.0 + kernel::max_abs(mu)))
      parse_fail(mh.lineno, "mu is not symmetric within 1e-10");

    spec.gauss.s_a = s_a;
    spec.gauss.s_b = s_b;
    spec.gauss.k = std::move(kmat);
    spec.gauss.mu = std::move(mu);
  } else if (kind.tokens[1] == "finite") {
    spec.kind = SpecKind::finite;
    spec.d_a = expect_keyed_int(ts, "d_a");
    spec.d_b = expect_keyed_int(ts, "d_b");
    if (spec.d_a < 1 || spec.d_b < 1)
      parse_fail(ts.last_lineno, "dimensions must be >= 1");
    const Eigen::Index d = Eigen::Index(spec.d_a) * spec.d_b;

    const TokenLine& sh = expect_line(ts, "'choi' or 'kraus' section");
    if (sh.tokens[0] == "choi") {
      if (sh.tokens.size() != 3)
        parse_fail(sh.lineno, "expected 'choi <rows> <cols>'");
      const int r = to_int(sh.tokens[1], sh.lineno);
      const int c = to_int(sh.tokens[2], sh.lineno);
      if (r != d || c != d)
        parse_fail(sh.lineno, "choi must be d_a*d_b square");
      spec.has_choi = true;
      spec.choi = read_complex_matrix(ts, d, d, "choi");
    } else if (sh.tokens[0] == "kraus") {
      if (sh.tokens.size() != 4)
        parse_fail(sh.lineno, "expected 'kraus <count> <rows> <cols>'");
      const int count = to_int(sh.tokens[1], sh.lineno);
      const int r = to_int(sh.tokens[2], sh.lineno);
      const int c = to_int(sh.tokens[3], sh.lineno);
      if (count < 1) parse_fail(sh.lineno, "kraus count must be >= 1");
      if (r != spec.d_b || c != spec.d_a)
        parse_fail(sh.lineno, "kraus operators must be d_b by d_a");
      spec.has_kraus = true;
      for (int i = 0; i < count; ++i)
        spec.kraus.push_back(read_complex_matrix(ts, r, c, "kraus operator"));
    } else {
      parse_fail(sh.lineno, "expected 'choi' or 'kraus' section");
    }
  } else {
    parse_fail(kind.lineno, "kind must be 'gaussian' or 'finite'");
  }

  if (!ts.done()) {
    const detail::TokenLine& extra = ts.take();
    detail::parse_fail(extra.lineno, "unexpected trailing content");
  }
  return spec;
}

inline ChannelSpecFile parse_spec_text(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

inline ChannelSpecFile parse_spec_path(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  return parse_spec(in);
}

// Spec writers emit the same grammar the parser accepts, so generated files
// (Kraus output in particular) round-trip.

namespace detail {

inline void write_real_row(std::ostream& os, const RVector& row) {
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    if (c) os << ' ';
    os << format_double(row(c));
  }
  os << '\n';
}

inline void write_complex_matrix(std::ostream& os, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    write_real_row(os, m.row(r).real().transpose());
    write_real_row(os, m.row(r).imag().transpose());
  }
}

}  // namespace detail

inline std::string write_gaussian_spec(const sympl::GaussianChannelSpec& g) {
  std::ostringstream os;
  os << "gausscj-spec 1\nkind gaussian\n";
  os << "s_a " << g.s_a << "\ns_b " << g.s_b << "\n";
  os << "K " << g.k.rows() << ' ' << g.k.cols() << "\n";
  for (Eigen::Index r = 0; r < g.k.rows(); ++r)
    detail::write_real_row(os, g.k.row(r).transpose());
  os << "mu " << g.mu.rows() << ' ' << g.mu.cols() << "\n";
  for (Eigen::Index r = 0; r < g.mu.rows(); ++r)
    detail::write_real_row(os, g.mu.row(r).transpose());
  return os.str();
}

inline std::string write_finite_choi_spec(const cj::ChoiMatrix& c) {
  std::ostringstream os;
  os << "gausscj-spec 1\nkind finite\n";
  os << "d_a " << c.d_a << "\nd_b " << c.d_b << "\n";
  os << "choi " << c.c.rows() << ' ' << c.c.cols() << "\n";
  detail::write_complex_matrix(os, c.c);
  return os.str();
}

inline std::string write_finite_kraus_spec(const cj::KrausSet& k) {
  std::ostringstream os;
  os << "gausscj-spec 1\nkind finite\n";
  os << "d_a " << k.d_a << "\nd_b " << k.d_b << "\n";
  os << "kraus " << k.ops.size() << ' ' << k.d_b << ' ' << k.d_a << "\n";
  for (const Matrix& op : k.ops) detail::write_complex_matrix(os, op);
  return os.str();
}

// Accumulates `key value` lines under the versioned report header.  Keys are
// caller-controlled and must be whitespace-free.
class MachineReport {
 public:
  void add(const std::string& key, const std::string& value) {
    body_ += key;
    body_ += ' ';
    body_ += value;
    body_ += '\n';
  }
  void add(const std::string& key, const char* value) {
    add(key, std::string(value));
  }
  void add(const std::string& key, double v) { add(key, format_double(v)); }
  void add(const std::string& key, int v) { add(key, std::to_string(v)); }
  void add(const std::string& key, bool v) {
    add(key, v ? std::string("true") : std::string("false"));
  }
  std::string str() const { return "gausscj-report 1\n" + body_; }

 private:
  std::string body_;
};

}  // namespace io
}  // namespace gausscj

#endif
