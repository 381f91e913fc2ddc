#pragma once

// Text formats: field files, run configurations, certificates and reports.
//
// Field file, one record per line ('#' starts a comment):
//   param delta 1e-3              named constant usable in coefficients
//   fixed_point 0 0               enclosure of the saddle (decimal strings)
//   diagonal -2.2 1.8             optional: terms are already F in eigen-coordinates
//   term m_s m_u c_s c_u          coefficient of x_s^m_s x_u^m_u in both components
// A coefficient is a product of factors joined by '*', each factor a decimal,
// a quotient a/b or a parameter name, optionally negated.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "saddlenf/errors.hpp"
#include "saddlenf/interval.hpp"
#include "saddlenf/normal_form.hpp"
#include "saddlenf/saddle_prep.hpp"

namespace saddlenf {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline std::string strip_comment(const std::string& line) { return line.substr(0, line.find('#')); }

inline int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorKind::ParseError, what + ": bad integer '" + s + "'");
  return v;
}

inline bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

inline Interval parse_atom(const std::string& tok, const std::map<std::string, Interval>& params) {
  if (is_identifier(tok)) {
    const auto it = params.find(tok);
    if (it == params.end()) throw Error(ErrorKind::ParseError, "unknown parameter '" + tok + "'");
    return it->second;
  }
  return Interval::from_decimal(tok);
}

}  // namespace detail

inline Interval parse_coefficient(const std::string& text, const std::map<std::string, Interval>& params) {
  const std::string t = detail::trim(text);
  if (t.empty()) throw Error(ErrorKind::ParseError, "empty coefficient");
  Interval value(1.0);
  std::size_t start = 0;
  while (start <= t.size()) {
    const auto star = t.find('*', start);
    std::string factor = detail::trim(t.substr(start, star == std::string::npos ? std::string::npos : star - start));
    bool negate = false;
    while (!factor.empty() && (factor[0] == '-' || factor[0] == '+')) {
      negate ^= factor[0] == '-';
      factor.erase(0, 1);
    }
    if (factor.empty()) throw Error(ErrorKind::ParseError, "empty factor in '" + t + "'");
    const auto slash = factor.find('/');
    Interval f = slash == std::string::npos
                     ? detail::parse_atom(factor, params)
                     : detail::parse_atom(detail::trim(factor.substr(0, slash)), params) /
                           detail::parse_atom(detail::trim(factor.substr(slash + 1)), params);
    value *= negate ? -f : f;
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return value;
}

struct FieldFile {
  std::map<std::string, Interval> params;
  RawField raw;
  std::optional<Spectrum> diagonal;
};

/// `overrides` replace parameter values given in the file (and may add new ones).
inline FieldFile parse_field(std::istream& in, const std::map<std::string, Interval>& overrides = {}) {
  FieldFile f;
  f.params = overrides;
  f.raw.fixed_point = {Interval{}, Interval{}};
  std::map<MultiIndex, int> seen;
  bool have_fixed_point = false;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(line));
    if (tok.empty()) continue;
    const std::string where = "field line " + std::to_string(lineno);
    try {
      if (tok[0] == "param") {
        if (tok.size() != 3 || !detail::is_identifier(tok[1])) throw Error(ErrorKind::ParseError, "expected: param NAME VALUE");
        if (!overrides.count(tok[1])) f.params[tok[1]] = parse_coefficient(tok[2], f.params);
      } else if (tok[0] == "fixed_point") {
        if (tok.size() != 3) throw Error(ErrorKind::ParseError, "expected: fixed_point A B");
        if (have_fixed_point) throw Error(ErrorKind::ParseError, "duplicate fixed_point");
        f.raw.fixed_point = {parse_coefficient(tok[1], f.params), parse_coefficient(tok[2], f.params)};
        have_fixed_point = true;
      } else if (tok[0] == "diagonal") {
        if (tok.size() != 3) throw Error(ErrorKind::ParseError, "expected: diagonal LAMBDA_S LAMBDA_U");
        if (f.diagonal) throw Error(ErrorKind::ParseError, "duplicate diagonal");
        f.diagonal = Spectrum{parse_coefficient(tok[1], f.params), parse_coefficient(tok[2], f.params)};
      } else if (tok[0] == "term") {
        if (tok.size() != 5) throw Error(ErrorKind::ParseError, "expected: term M_S M_U C_S C_U");
        const MultiIndex m{detail::parse_int(tok[1], where), detail::parse_int(tok[2], where)};
        if (m.s < 0 || m.u < 0) throw Error(ErrorKind::ParseError, "negative exponent");
        if (seen.count(m)) {
          throw Error(ErrorKind::ParseError, "duplicate term " + tok[1] + " " + tok[2] + " (first on line " +
                                                 std::to_string(seen[m]) + ")");
        }
        seen[m] = lineno;
        const Interval cs = parse_coefficient(tok[3], f.params);
        const Interval cu = parse_coefficient(tok[4], f.params);
        if (!is_exact_zero(cs)) f.raw.components[0][m] = cs;
        if (!is_exact_zero(cu)) f.raw.components[1][m] = cu;
      } else {
        throw Error(ErrorKind::ParseError, "unknown record '" + tok[0] + "'");
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ParseError && e.kind() != ErrorKind::DivisionByZeroInterval) throw;
      throw Error(ErrorKind::ParseError, where + ": " + e.what());
    }
  }
  if (f.diagonal && have_fixed_point &&
      !(is_exact_zero(f.raw.fixed_point[0]) && is_exact_zero(f.raw.fixed_point[1]))) {
    throw Error(ErrorKind::ParseError, "a diagonal field must have its fixed point at 0 0");
  }
  return f;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  return in;
}

inline FieldFile load_field(const std::string& path, const std::map<std::string, Interval>& overrides = {}) {
  auto in = open_input(path);
  return parse_field(in, overrides);
}

/// Field in eigen-coordinates, ready for certification.
inline DiagField to_diag(const FieldFile& f) {
  if (!f.diagonal) return diagonalize(f.raw);
  for (const auto& comp : f.raw.components) {
    for (const auto& [m, c] : comp) {
      if (m.order() < 2 && !is_exact_zero(c)) {
        throw Error(ErrorKind::ParseError, "a diagonal field lists only terms of order >= 2");
      }
    }
  }
  return make_diag_field(*f.diagonal, f.raw.components);
}

/// key = value lines; every HeuristicConfig knob is accepted.
inline HeuristicConfig parse_config(std::istream& in) {
  HeuristicConfig cfg;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const std::string body = detail::trim(detail::strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "config line " + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, where + ": expected key = value");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string val = detail::trim(body.substr(eq + 1));
    auto real = [&] {
      // Accept 2^-53 style powers of two as well as plain numbers.
      if (val.rfind("2^", 0) == 0) return std::ldexp(1.0, detail::parse_int(val.substr(2), where));
      try {
        return parse_exact(val);
      } catch (const Error&) {
        throw Error(ErrorKind::ParseError, where + ": bad number '" + val + "'");
      }
    };
    auto integer = [&] { return detail::parse_int(val, where); };
    if (key == "iota") cfg.iota = integer();
    else if (key == "eta") cfg.eta = real();
    else if (key == "mu") cfg.mu = real();
    else if (key == "rho") cfg.rho = integer();
    else if (key == "N_G") cfg.ng_absolute = integer();
    else if (key == "ng_factor") cfg.ng_factor = integer();
    else if (key == "eps_phi") cfg.eps_phi = real();
    else if (key == "eps_G") cfg.eps_G = real();
    else if (key == "eps") cfg.eps = real();
    else if (key == "kappa_threshold") cfg.kappa_threshold = real();
    else if (key == "retries") cfg.retries = integer();
    else if (key == "n0") cfg.n0_override = integer();
    else if (key == "n1") cfg.n1_override = integer();
    else if (key == "rate_growth") cfg.rate_growth = real();
    else if (key == "rate_steps") cfg.rate_steps = integer();
    else throw Error(ErrorKind::ParseError, where + ": unknown key '" + key + "'");
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return cfg;
}

inline HeuristicConfig load_config(const std::string& path) {
  auto in = open_input(path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Certificate document. Every interval is stored with round-trip endpoints so
// that reloading reproduces the certificate bit for bit.

namespace detail {

inline std::string component_name(std::size_t i) { return i == 0 ? "s" : "u"; }

inline void write_series(std::ostream& out, const std::string& tag, const SeriesPair<Interval>& p) {
  out << tag << "_degree " << p[0].degree() << "\n";
  for (std::size_t i = 0; i < 2; ++i) {
    p[i].for_each([&](const MultiIndex& m, const Interval& c) {
      if (!is_exact_zero(c)) out << tag << " " << component_name(i) << " " << m.s << " " << m.u << " " << exact_format(c) << "\n";
    });
  }
}

inline void write_majorant(std::ostream& out, const std::string& tag, const MajorantSeries1& a) {
  out << tag << "_degree " << a.degree() << "\n";
  for (int k = 0; k <= a.degree(); ++k) {
    if (!is_exact_zero(a[k])) out << tag << " " << k << " " << exact_format(a[k]) << "\n";
  }
}

inline void write_fit(std::ostream& out, const std::string& tag, const GeometricFit& f) {
  out << tag << " " << exact_format(f.C) << " " << exact_format(f.M) << " " << f.k_first << " " << f.k_last << " "
      << (f.all_zero ? 1 : 0) << "\n";
}

}  // namespace detail

inline void write_certificate(std::ostream& out, const Certificate& c) {
  const auto& g = c.config;
  out << "saddlenf-certificate 1\n";
  out << "config iota " << g.iota << "\n";
  out << "config eta " << exact_string(g.eta) << "\n";
  out << "config mu " << exact_string(g.mu) << "\n";
  out << "config rho " << g.rho << "\n";
  out << "config ng_factor " << g.ng_factor << "\n";
  if (g.ng_absolute) out << "config N_G " << *g.ng_absolute << "\n";
  out << "config eps_phi " << exact_string(g.eps_phi) << "\n";
  out << "config eps_G " << exact_string(g.eps_G) << "\n";
  out << "config eps " << exact_string(g.eps) << "\n";
  out << "config kappa_threshold " << exact_string(g.kappa_threshold) << "\n";
  out << "config retries " << g.retries << "\n";
  if (g.n0_override) out << "config n0 " << *g.n0_override << "\n";
  if (g.n1_override) out << "config n1 " << *g.n1_override << "\n";
  out << "config rate_growth " << exact_string(g.rate_growth) << "\n";
  out << "config rate_steps " << g.rate_steps << "\n";

  out << "lambda_s " << exact_format(c.field.spectrum.lambda_s) << "\n";
  out << "lambda_u " << exact_format(c.field.spectrum.lambda_u) << "\n";
  detail::write_series(out, "F", c.field.F);
  out << "flatness " << c.flatness.l << " " << c.flatness.resonance_order << " " << c.flatness.N_l << " "
      << exact_format(c.flatness.lambda_check) << " " << exact_format(c.flatness.lambda_hat) << "\n";
  out << "orders " << c.n0 << " " << c.n1 << " " << c.N_G << "\n";
  detail::write_series(out, "phi", c.phi);
  detail::write_majorant(out, "alpha_hat", c.alpha_hat);
  detail::write_fit(out, "phi_fit", c.phi_fit);
  out << "phi_rate_steps " << c.phi_rate_steps << "\n";
  out << "A " << exact_format(c.A) << "\n";
  out << "phi_induction " << exact_format(c.phi_induction) << "\n";
  out << "r_phi " << exact_format(c.r_phi) << "\n";
  out << "r0 " << exact_format(c.r0) << "\n";
  out << "K0 " << exact_format(c.K0) << "\n";
  detail::write_majorant(out, "g_hat", c.g_hat);
  detail::write_fit(out, "g_fit", c.g_fit);
  out << "g_rate_steps " << c.g_rate_steps << "\n";
  out << "psi_induction " << exact_format(c.psi_induction) << "\n";
  out << "r1 " << exact_format(c.r1) << "\n";
  out << "halvings " << c.r2_halvings << " " << c.r3_halvings << "\n";
  out << "r2 " << exact_format(c.r2) << "\n";
  out << "r3 " << exact_format(c.r3) << "\n";
  out << "kappa " << exact_format(c.kappa) << "\n";
  for (const auto& w : c.warnings) out << "warning " << w << "\n";
  out << "end\n";
}

inline std::string certificate_to_string(const Certificate& c) {
  std::ostringstream out;
  write_certificate(out, c);
  return out.str();
}

inline Certificate read_certificate(std::istream& in) {
  Certificate c;
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "saddlenf-certificate 1") {
    throw Error(ErrorKind::ParseError, "not a certificate document");
  }
  int lineno = 1;
  bool ended = false;
  std::ostringstream config_text;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::ParseError, "certificate line " + std::to_string(lineno) + ": " + what);
  };
  auto interval = [&](const std::string& s) { return parse_exact_interval(s); };
  auto read_fit = [&](const std::vector<std::string>& t) {
    if (t.size() != 6) fail("bad fit record");
    GeometricFit f;
    f.C = interval(t[1]);
    f.M = interval(t[2]);
    f.k_first = detail::parse_int(t[3], "fit");
    f.k_last = detail::parse_int(t[4], "fit");
    f.all_zero = t[5] == "1";
    return f;
  };
  auto series_entry = [&](SeriesPair<Interval>& p, const std::vector<std::string>& t) {
    if (t.size() != 5 || (t[1] != "s" && t[1] != "u")) fail("bad series record");
    const MultiIndex m{detail::parse_int(t[2], "index"), detail::parse_int(t[3], "index")};
    if (m.s < 0 || m.u < 0 || m.order() > p[0].degree()) fail("series index out of range");
    p[t[1] == "s" ? 0 : 1].at(m) = interval(t[4]);
  };
  auto majorant_entry = [&](MajorantSeries1& a, const std::vector<std::string>& t) {
    if (t.size() != 3) fail("bad majorant record");
    a.set(detail::parse_int(t[1], "order"), interval(t[2]));
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("warning ", 0) == 0) {
      c.warnings.push_back(line.substr(8));
      continue;
    }
    const auto t = detail::split_ws(line);
    if (t.empty()) continue;
    try {
      const std::string& k = t[0];
      if (k == "end") {
        ended = true;
        break;
      } else if (k == "config") {
        if (t.size() != 3) fail("bad config record");
        config_text << t[1] << " = " << t[2] << "\n";
      } else if (k == "lambda_s") c.field.spectrum.lambda_s = interval(t.at(1));
      else if (k == "lambda_u") c.field.spectrum.lambda_u = interval(t.at(1));
      else if (k == "F_degree") {
        const int d = detail::parse_int(t.at(1), "degree");
        c.field.F = {Series2(d), Series2(d)};
      } else if (k == "F") series_entry(c.field.F, t);
      else if (k == "flatness") {
        if (t.size() != 6) fail("bad flatness record");
        c.flatness.l = detail::parse_int(t[1], "l");
        c.flatness.resonance_order = detail::parse_int(t[2], "resonance order");
        c.flatness.N_l = detail::parse_int(t[3], "N");
        c.flatness.lambda_check = interval(t[4]);
        c.flatness.lambda_hat = interval(t[5]);
      } else if (k == "orders") {
        if (t.size() != 4) fail("bad orders record");
        c.n0 = detail::parse_int(t[1], "n0");
        c.n1 = detail::parse_int(t[2], "n1");
        c.N_G = detail::parse_int(t[3], "N_G");
      } else if (k == "phi_degree") {
        const int d = detail::parse_int(t.at(1), "degree");
        c.phi = {Series2(d), Series2(d)};
      } else if (k == "phi") series_entry(c.phi, t);
      else if (k == "alpha_hat_degree") c.alpha_hat = MajorantSeries1(detail::parse_int(t.at(1), "degree"));
      else if (k == "alpha_hat") majorant_entry(c.alpha_hat, t);
      else if (k == "phi_fit") c.phi_fit = read_fit(t);
      else if (k == "phi_rate_steps") c.phi_rate_steps = detail::parse_int(t.at(1), "steps");
      else if (k == "A") c.A = interval(t.at(1));
      else if (k == "phi_induction") c.phi_induction = interval(t.at(1));
      else if (k == "r_phi") c.r_phi = interval(t.at(1));
      else if (k == "r0") c.r0 = interval(t.at(1));
      else if (k == "K0") c.K0 = interval(t.at(1));
      else if (k == "g_hat_degree") c.g_hat = MajorantSeries1(detail::parse_int(t.at(1), "degree"));
      else if (k == "g_hat") majorant_entry(c.g_hat, t);
      else if (k == "g_fit") c.g_fit = read_fit(t);
      else if (k == "g_rate_steps") c.g_rate_steps = detail::parse_int(t.at(1), "steps");
      else if (k == "psi_induction") c.psi_induction = interval(t.at(1));
      else if (k == "r1") c.r1 = interval(t.at(1));
      else if (k == "halvings") {
        if (t.size() != 3) fail("bad halvings record");
        c.r2_halvings = detail::parse_int(t[1], "halvings");
        c.r3_halvings = detail::parse_int(t[2], "halvings");
      } else if (k == "r2") c.r2 = interval(t.at(1));
      else if (k == "r3") c.r3 = interval(t.at(1));
      else if (k == "kappa") c.kappa = interval(t.at(1));
      else fail("unknown record '" + k + "'");
    } catch (const std::out_of_range&) {
      fail("missing value");
    }
  }
  if (!ended) throw Error(ErrorKind::ParseError, "certificate is truncated");
  std::istringstream cfg_in(config_text.str());
  c.config = parse_config(cfg_in);
  c.field.validate();
  return c;
}

inline Certificate certificate_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_certificate(in);
}

inline Certificate load_certificate(const std::string& path) {
  auto in = open_input(path);
  return read_certificate(in);
}

// ---------------------------------------------------------------------------
// Human-readable report with one line per certified quantity.

namespace detail {

inline std::string show(const Interval& x) {
  const double m = x.mag();
  return format(x, 5, m != 0 && (m < 1e-2 || m >= 1e5));
}

}  // namespace detail

inline std::string report(const Certificate& c) {
  using detail::show;
  std::ostringstream out;
  if (c.flatness.resonance_order > 0) {
    out << "resonance of order " << c.flatness.resonance_order << " found\n";
  } else {
    out << "no resonance below order " << c.config.iota << "\n";
  }
  out << "l = " << c.flatness.l << ", N_l = " << c.flatness.N_l << "\n";
  out << "Taylor order = " << c.n1 << "\n";
  out << "n_0 = " << c.n0 << ", n_1 = " << c.n1 << "\n";
  out << "C = " << show(c.C()) << "  M = " << show(c.M()) << "\n";
  out << "A = " << show(c.A) << "\n";
  out << "phi analytic for |x| < r_phi = " << show(c.r_phi) << "\n";
  out << "K_0 <= " << show(c.K0) << " for |x| < r_0 = " << show(c.r0) << "\n";
  out << "D = " << show(c.D()) << "  K = " << show(c.K()) << "\n";
  out << "G analytic for |x| < r_1 = " << show(c.r1) << "\n";
  out << "kappa <= " << show(c.kappa) << " for |x| < r_2 = " << show(c.r2) << "\n";
  out << "normal form box radius r_3 = " << show(c.r3) << "\n";
  for (const auto& w : c.warnings) out << "note: " << w << "\n";
  return out.str();
}

}  // namespace saddlenf
