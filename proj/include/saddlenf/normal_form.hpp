#pragma once

// Auto-validated robust normal form of a planar saddle.
//
// Solves the homological equation for the near-identity change of variables
// x = y + phi(y) order by order, majorises phi and the normal-form remainder
// G by geometric envelopes, proves the envelopes by induction and turns them
// into the constants (K0, kappa and the radii) needed to pass the saddle.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saddlenf/errors.hpp"
#include "saddlenf/flatness.hpp"
#include "saddlenf/interval.hpp"
#include "saddlenf/saddle_prep.hpp"
#include "saddlenf/series.hpp"

namespace saddlenf {

struct HeuristicConfig {
  int iota = 10;       ///< largest order of flatness tried
  double eta = 0.2;    ///< n1 = ceil((1+eta) N(l))
  double mu = 0.1;     ///< n0 = floor((1+mu)/2 N(l))
  int rho = 20;        ///< explicit terms in the bound A on F-hat
  int ng_factor = 4;   ///< N_G = ng_factor * l unless ng_absolute is set
  std::optional<int> ng_absolute;
  double eps_phi = 0.1;
  double eps_G = 0.5;
  double eps = 0.9;
  double kappa_threshold = 0x1p-53;
  int retries = 8;
  /// When an induction test fails, the fitted rate is raised by this factor
  /// (C re-certified) up to rate_steps times.
  double rate_growth = 1.0905077326652577;  // 2^(1/8)
  int rate_steps = 80;
  std::optional<int> n0_override;
  std::optional<int> n1_override;

  int N_G(int l) const { return ng_absolute ? *ng_absolute : ng_factor * l; }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, "config: " + what); };
    if (iota < 2) fail("iota must be >= 2");
    if (!(eta > 0)) fail("eta must be > 0");
    // With both orders given explicitly, eta and mu are not used.
    if (!(n0_override && n1_override) && !(mu > -1 && mu < eta)) fail("mu must lie in (-1, eta)");
    if (rho < 2) fail("rho must be >= 2");
    if (ng_absolute && *ng_absolute < 2) fail("N_G must be positive");
    if (!ng_absolute && ng_factor < 3) fail("N_G factor must exceed 2");
    for (double e : {eps_phi, eps_G, eps}) {
      if (!(e > 0 && e < 1)) fail("eps_phi, eps_G and eps must lie in (0,1)");
    }
    if (!(kappa_threshold > 0)) fail("kappa_threshold must be > 0");
    if (retries < 0) fail("retries must be >= 0");
    if (!(rate_growth > 1) || !std::isfinite(rate_growth)) fail("rate_growth must be > 1");
    if (rate_steps < 0) fail("rate_steps must be >= 0");
  }
};

/// value_k <= C * M^k certified on [k_first, k_last].
struct GeometricFit {
  Interval C;
  Interval M{1.0};
  int k_first = 0;
  int k_last = 0;
  bool all_zero = false;
  std::vector<std::string> warnings;
};

struct Orders {
  int n0;
  int n1;
};

inline Orders derive_orders(const FlatnessData& fd, const HeuristicConfig& cfg) {
  const double N = static_cast<double>(fd.N_l);
  // The tolerance keeps exact products such as 0.6 * 25 on the intended side.
  int n1 = static_cast<int>(std::ceil((1 + cfg.eta) * N - 1e-9));
  int n0 = static_cast<int>(std::floor((1 + cfg.mu) / 2 * N + 1e-9));
  if (cfg.n0_override) n0 = *cfg.n0_override;
  if (cfg.n1_override) n1 = *cfg.n1_override;
  if (n0 < 1) throw Error(ErrorKind::OrderConstraintViolated, "n0 must be at least 1 (raise mu)");
  if (n1 <= fd.N_l) throw Error(ErrorKind::OrderConstraintViolated, "n1 must exceed N(l) (raise eta)");
  if (n1 <= 2 * n0) throw Error(ErrorKind::OrderConstraintViolated, "n1 must exceed 2 n0 (raise eta or lower mu)");
  return {n0, n1};
}

/// Coefficients of phi up to order n1, supported on V_l.
inline SeriesPair<Interval> solve_phi(const DiagField& field, int l, int n1) {
  field.validate();
  SeriesPair<Interval> phi{Series2(n1), Series2(n1)};
  const SeriesPair<Interval> F{field.F[0].truncated(n1), field.F[1].truncated(n1)};
  for (int k = 2; k <= n1; ++k) {
    const Series2 rhs_s = compose_shift(F[0], phi, k);
    const Series2 rhs_u = compose_shift(F[1], phi, k);
    for (int mu = 0; mu <= k; ++mu) {
      const MultiIndex m{k - mu, mu};
      if (!in_filter(m, l, FilterSet::V)) continue;
      phi[0].at(m) = rhs_s[m] / divisor(m, Component::s, field.spectrum);
      phi[1].at(m) = rhs_u[m] / divisor(m, Component::u, field.spectrum);
    }
  }
  return phi;
}

/// L_Lambda phi - [F(y + phi(y))]_{V_l}, coefficientwise up to the degree of phi.
inline SeriesPair<Interval> functional_residual(const DiagField& field, const SeriesPair<Interval>& phi, int l) {
  const int d = phi[0].degree();
  SeriesPair<Interval> out{Series2(d), Series2(d)};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto comp = i == 0 ? Component::s : Component::u;
    const Series2 rhs = filter(compose_shift(field.F[i].truncated(d), phi, d), l, FilterSet::V);
    phi[i].for_each([&](const MultiIndex& m, const Interval& a) {
      if (m.order() < 2) return;
      const Interval lhs = (Interval(static_cast<double>(m.s)) * field.spectrum.lambda_s +
                            Interval(static_cast<double>(m.u)) * field.spectrum.lambda_u -
                            (comp == Component::s ? field.spectrum.lambda_s : field.spectrum.lambda_u)) *
                           a;
      out[i].at(m) = lhs - rhs[m];
    });
  }
  return out;
}

/// Smallest C (up to a few ulps) with value_k <= C M^k on the fit window,
/// starting from the guess C0.
inline GeometricFit with_rate(const MajorantSeries1& values, GeometricFit fit, double M, double C0 = 1.0) {
  if (!(M > 0) || !std::isfinite(M)) throw Error(ErrorKind::InvalidArgument, "rate must be positive and finite");
  if (fit.all_zero) return fit;
  const Interval Mi(M);
  double factor = 0.0;
  for (int k = fit.k_first; k <= fit.k_last; ++k) {
    if (values[k].hi() <= 0) continue;
    const Interval ratio = Interval(values[k].hi()) / (Interval(C0) * pow(Mi, k));
    factor = std::max(factor, ratio.hi());
  }
  double C = (Interval(C0) * Interval(factor)).hi();
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool ok = true;
    for (int k = fit.k_first; k <= fit.k_last && ok; ++k) {
      ok = values[k].hi() <= (Interval(C) * pow(Mi, k)).lo();
    }
    if (ok) break;
    C = rounding::up(C);
  }
  fit.C = Interval(C);
  fit.M = Mi;
  return fit;
}

/// Least-squares fit of log(value_k) = log C + k log M over the nonzero values
/// in (k_lo, k_hi], then C rescaled so that the envelope is certified on the
/// whole window. M is never adjusted after the fit.
inline GeometricFit fit_geometric(const MajorantSeries1& values, int k_lo, int k_hi) {
  if (k_hi <= k_lo) throw Error(ErrorKind::InvalidArgument, "empty fit range");
  GeometricFit fit;
  fit.k_first = k_lo + 1;
  fit.k_last = k_hi;

  auto nonzero_in = [&](int lo) {
    std::vector<int> ks;
    for (int k = lo + 1; k <= k_hi; ++k) {
      if (values[k].hi() > 0) ks.push_back(k);
    }
    return ks;
  };
  const int window = k_hi - k_lo;
  int ls_lo = k_lo;
  std::vector<int> ks = nonzero_in(ls_lo);
  while (2 * static_cast<int>(ks.size()) < window && ls_lo > 0) {
    --ls_lo;
    ks = nonzero_in(ls_lo);
  }
  if (ls_lo != k_lo) {
    fit.warnings.push_back("more than half of the fit window is zero; least squares window shifted down to (" +
                           std::to_string(ls_lo) + "," + std::to_string(k_hi) + "]");
  }
  if (ks.empty()) {
    bool any = false;
    for (int k = fit.k_first; k <= k_hi; ++k) any = any || values[k].hi() > 0;
    if (!any) {
      fit.all_zero = true;
      fit.C = Interval(0.0);
      fit.M = Interval(1.0);
      fit.warnings.push_back("all values in the fit window are zero; using C = 0, M = 1");
      return fit;
    }
  }

  double slope = 0.0;
  double intercept = 0.0;
  if (ks.size() == 1) {
    intercept = std::log(values[ks[0]].hi());
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k : ks) {
      const double y = std::log(values[k].hi());
      sx += k;
      sy += y;
      sxx += static_cast<double>(k) * k;
      sxy += k * y;
    }
    const double n = static_cast<double>(ks.size());
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    intercept = (sy - slope * sx) / n;
  }
  return with_rate(values, fit, std::exp(slope), std::exp(intercept));
}

inline bool envelope_holds(const MajorantSeries1& values, const GeometricFit& fit) {
  for (int k = fit.k_first; k <= fit.k_last; ++k) {
    if (values[k].hi() > (fit.C * pow(fit.M, k)).lo()) return false;
  }
  return true;
}

/// c-hat_k = sum_{|m|=k} max(|c_s,m|, |c_u,m|).
inline MajorantSeries1 field_majorant(const DiagField& field) { return majorant_collapse(field.F[0], field.F[1]); }

/// Bound A with F-hat(x) <= A |x|^2 on |x| < s.
inline Interval compute_A(const DiagField& field, const Interval& s, int rho) {
  if (!s.certainly_positive()) throw Error(ErrorKind::InvalidArgument, "A needs s > 0");
  if (rho < 2) throw Error(ErrorKind::InvalidArgument, "rho must be >= 2");
  const MajorantSeries1 c_hat = field_majorant(field);
  Interval A;
  for (int k = 2; k <= std::min(rho, c_hat.degree()); ++k) A += c_hat[k] * pow(s, k - 2);
  if (c_hat.degree() <= rho) return A;  // polynomial F: no terms beyond rho
  Interval norms;
  const Interval two_s = Interval(2.0) * s;
  for (const auto& f : field.F) {
    f.for_each([&](const MultiIndex& m, const Interval& c) {
      if (!is_exact_zero(c)) norms += Interval(c.mag()) * pow(two_s, m.order());
    });
  }
  A += norms / sqr(s) * pow(Interval(0.5), rho) * Interval(static_cast<double>(rho + 3));
  return A;
}

struct InductionCheck {
  bool ok = false;
  Interval value;
};

/// (A / Omega(n1+1)) (2 sum_{k=1}^{n0} alpha_k s^k + n1 C) < 1 with alpha_1 = 1
/// and s = 1/M certifies analyticity of phi on |x| < s.
inline InductionCheck verify_phi_convergence(const Interval& A, const FlatnessData& fd, int n0, int n1,
                                             const MajorantSeries1& alpha_hat, const GeometricFit& fit) {
  if (n1 <= std::max<long long>(2LL * n0, fd.N_l)) {
    throw Error(ErrorKind::OrderConstraintViolated, "need n1 > max(2 n0, N(l))");
  }
  if (is_exact_zero(A)) return {true, Interval(0.0)};
  const Interval s = Interval(1.0) / fit.M;
  Interval sum = s;  // alpha_1 = 1
  for (int k = 2; k <= n0; ++k) sum += alpha_hat[k] * pow(s, k);
  const Interval value =
      A / omega(n1 + 1, fd) * (Interval(2.0) * sum + Interval(static_cast<double>(n1)) * fit.C);
  return {value.hi() < 1, value};
}

/// alpha-hat up to `degree`, continued beyond the computed orders by the
/// certified envelope C M^k.
inline MajorantSeries1 extend_with_envelope(const MajorantSeries1& alpha_hat, const GeometricFit& fit, int degree) {
  MajorantSeries1 out(degree);
  for (int k = 2; k <= degree; ++k) {
    out.set(k, k <= alpha_hat.degree() ? alpha_hat[k] : Interval(0.0, (fit.C * pow(fit.M, k)).hi()));
  }
  return out;
}

/// g-hat_k = [F-hat(x + phi-hat) + 2 (phi-hat)' G-hat]_k for 2l <= k <= N_G,
/// zero below 2l.
inline MajorantSeries1 solve_g_hat(const DiagField& field, const MajorantSeries1& alpha_hat,
                                   const GeometricFit& phi_fit, int l, int N_G) {
  if (N_G <= 2 * l) throw Error(ErrorKind::InvalidArgument, "N_G must exceed 2l");
  const MajorantSeries1 phi_hat = extend_with_envelope(alpha_hat, phi_fit, N_G);
  MajorantSeries1 w = phi_hat;
  w.set(1, Interval(1.0));
  const MajorantSeries1 shifted = field_majorant(field).compose(w, N_G);
  MajorantSeries1 g(N_G);
  for (int k = 2 * l; k <= N_G; ++k) {
    Interval v = shifted[k];
    for (int i = 2; i <= k + 1 - 2 * l; ++i) {
      v += Interval(2.0 * i) * phi_hat[i] * g[k + 1 - i];
    }
    g.set(k, v);
  }
  return g;
}

/// Psi(N_G) < 1 certifies g-hat_k <= D K^k for every k and analyticity of G on
/// |x| < 1/K.
inline InductionCheck verify_G_convergence(const Interval& A, const GeometricFit& phi_fit,
                                           const GeometricFit& g_fit, const MajorantSeries1& alpha_hat, int n0,
                                           int N_G) {
  const Interval& C = phi_fit.C;
  const Interval& M = phi_fit.M;
  const Interval& D = g_fit.C;
  const Interval& K = g_fit.M;
  if (is_exact_zero(D)) {
    bool alpha_zero = true;
    for (int k = 2; k <= alpha_hat.degree(); ++k) alpha_zero = alpha_zero && is_exact_zero(alpha_hat[k]);
    const bool ok = is_exact_zero(A) || (alpha_zero && is_exact_zero(C));
    return {ok, ok ? Interval(0.0) : Interval::entire()};
  }
  if (!certainly_less(M, K)) throw Error(ErrorKind::KNotGreaterThanM, "G envelope rate K must exceed M");
  const Interval q = M / K;
  Interval head = Interval(1.0) / M;  // alpha_1 = 1
  for (int k = 2; k <= n0; ++k) head += alpha_hat[k] / pow(M, k);
  const Interval first = A * ((Interval(2.0) * head + C * Interval(static_cast<double>(N_G - 2 * n0))) * (C / D) *
                              pow(q, N_G + 1));
  Interval derivative_sum;
  for (int k = 2; k <= n0; ++k) derivative_sum += Interval(static_cast<double>(k)) * alpha_hat[k] / pow(K, k - 1);
  const Interval tail = C * M * pow(q, n0) *
                        (Interval(static_cast<double>(n0 + 1)) - Interval(static_cast<double>(n0)) * q) /
                        sqr(Interval(1.0) - q);
  const Interval value = first + Interval(2.0) * (derivative_sum + tail);
  return {value.hi() < 1, value};
}

/// ||phi||_r <= K0 r^2 for r < r0.
inline Interval compute_K0(const MajorantSeries1& alpha_hat, const GeometricFit& fit, int n0, const Interval& r0) {
  const Interval Mr0 = fit.M * r0;
  if (!(Mr0.hi() < 1)) throw Error(ErrorKind::TailDiverges, "M r0 must be < 1");
  Interval K0;
  for (int k = 2; k <= n0; ++k) K0 += alpha_hat[k] * pow(r0, k - 2);
  K0 += fit.C * sqr(fit.M) * pow(Mr0, n0 - 1) / (Interval(1.0) - Mr0);
  return K0;
}

/// Bound on ||phi^{-1}||_r: K0 r*^2 where r = r* - K0 r*^2. Valid for
/// r < r0 (1 - K0 r0).
inline Interval phi_inverse_bound(const Interval& r, const Interval& K0, const Interval& r0) {
  if (is_exact_zero(K0)) return Interval(0.0);
  if (!certainly_less(r, r0 * (Interval(1.0) - K0 * r0))) {
    throw Error(ErrorKind::InverseDomainViolated, "need r < r0 (1 - K0 r0)");
  }
  const Interval disc = Interval(1.0) - Interval(4.0) * K0 * r;
  if (!disc.certainly_positive()) throw Error(ErrorKind::NegativeDiscriminant, "need 4 K0 r < 1");
  // r* = (1 - sqrt(1 - 4 K0 r)) / (2 K0), written without cancellation.
  const Interval r_star = Interval(2.0) * r / (Interval(1.0) + sqrt(disc));
  return K0 * sqr(r_star);
}

/// kappa = D K^{2l} r2^{2l-1} / (1 - K r2).
inline Interval compute_kappa(const Interval& D, const Interval& K, int l, const Interval& r2) {
  const Interval Kr2 = K * r2;
  if (!(Kr2.hi() < 1)) throw Error(ErrorKind::TailDiverges, "K r2 must be < 1");
  return D * pow(K, 2 * l) * pow(r2, 2 * l - 1) / (Interval(1.0) - Kr2);
}

struct Certificate {
  DiagField field;
  HeuristicConfig config;
  FlatnessData flatness;
  int n0 = 0;
  int n1 = 0;
  int N_G = 0;
  SeriesPair<Interval> phi{Series2(2), Series2(2)};
  MajorantSeries1 alpha_hat;
  GeometricFit phi_fit;  // C, M
  int phi_rate_steps = 0;
  Interval A;
  Interval phi_induction;  // left side of the phi convergence test
  Interval r_phi;
  Interval r0;
  Interval K0;
  MajorantSeries1 g_hat;
  GeometricFit g_fit;  // D, K
  int g_rate_steps = 0;
  Interval psi_induction;
  Interval r1;
  int r2_halvings = 0;
  int r3_halvings = 0;
  Interval r2;
  Interval r3;
  Interval kappa;
  std::vector<std::string> warnings;

  const Interval& C() const { return phi_fit.C; }
  const Interval& M() const { return phi_fit.M; }
  const Interval& D() const { return g_fit.C; }
  const Interval& K() const { return g_fit.M; }
};

struct CheckResult {
  std::string name;
  bool passed;
};

inline Interval kappa_limit(const Spectrum& spec, double threshold) {
  const Interval smallest =
      min(min(-spec.lambda_s, spec.lambda_u), abs(spec.lambda_s + spec.lambda_u));
  return Interval(threshold) * smallest;
}

inline Interval shrink(const Interval& r, int halvings) { return r * Interval(std::ldexp(1.0, -halvings)); }

/// Every machine-checkable invariant of a certificate, recomputed from its
/// stored ingredients.
inline std::vector<CheckResult> certificate_checks(const Certificate& c) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok) { out.push_back({std::move(name), ok}); };
  const bool degenerate_g = is_exact_zero(c.D());

  add("alpha_hat envelope C M^k on (n0, n1]", envelope_holds(c.alpha_hat, c.phi_fit) &&
                                                  c.phi_fit.k_first == c.n0 + 1 && c.phi_fit.k_last == c.n1);
  add("g_hat envelope D K^k on [2l, N_G]", envelope_holds(c.g_hat, c.g_fit) &&
                                               c.g_fit.k_first == 2 * c.flatness.l && c.g_fit.k_last == c.N_G);
  add("n1 > max(2 n0, N(l))", c.n1 > std::max<long long>(2LL * c.n0, c.flatness.N_l));
  add("phi induction < 1", c.phi_induction.hi() < 1);
  add("G induction Psi(N_G) < 1", c.psi_induction.hi() < 1);
  add("r_phi = 1/M", c.r_phi == Interval(1.0) / c.M());
  add("r1 = 1/K", c.r1 == Interval(1.0) / c.K());
  add("K > M", degenerate_g || certainly_less(c.M(), c.K()));
  add("r0 = eps_phi r_phi", c.r0 == Interval(c.config.eps_phi) * c.r_phi);
  add("r2 = eps_G r1 / 2^j", c.r2 == shrink(Interval(c.config.eps_G) * c.r1, c.r2_halvings));
  add("r3 = eps min(r0, r2) / 2^j", c.r3 == shrink(Interval(c.config.eps) * min(c.r0, c.r2), c.r3_halvings));
  add("M r0 < 1", (c.M() * c.r0).hi() < 1);
  add("K r2 < 1", (c.K() * c.r2).hi() < 1);
  add("K0 consistent", c.K0 == compute_K0(c.alpha_hat, c.phi_fit, c.n0, c.r0));
  add("kappa consistent", c.kappa == compute_kappa(c.D(), c.K(), c.flatness.l, c.r2));
  add("r3 + r3^2 K0 < r2", certainly_less(c.r3 + sqr(c.r3) * c.K0, c.r2));
  add("r3 < r0 (1 - K0 r0)", certainly_less(c.r3, c.r0 * (Interval(1.0) - c.K0 * c.r0)));
  add("kappa << min(-lambda_s, lambda_u, |lambda_s + lambda_u|)",
      certainly_less(c.kappa, kappa_limit(c.field.spectrum, c.config.kappa_threshold)));
  return out;
}

inline bool certificate_valid(const Certificate& c) {
  const auto checks = certificate_checks(c);
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.passed; });
}

/// Run the full pipeline. Throws CertificationFailed naming the stage that
/// could not be verified and the configuration knobs that influence it.
inline Certificate certify(const DiagField& field, const HeuristicConfig& cfg) {
  cfg.validate();
  field.validate();
  Certificate c;
  c.field = field;
  c.config = cfg;

  try {
    c.flatness = flatness(field.spectrum, cfg.iota);
  } catch (const Error& e) {
    throw CertificationFailed("flatness", "iota; tighter eigenvalue enclosures", e.what());
  }
  const int l = c.flatness.l;
  try {
    const Orders o = derive_orders(c.flatness, cfg);
    c.n0 = o.n0;
    c.n1 = o.n1;
  } catch (const Error& e) {
    throw CertificationFailed("orders", "eta, mu, n0, n1", e.what());
  }
  c.N_G = cfg.N_G(l);
  if (c.N_G <= 2 * l) throw CertificationFailed("orders", "N_G", "N_G must exceed 2l");

  try {
    c.phi = solve_phi(field, l, c.n1);
  } catch (const Error& e) {
    throw CertificationFailed("phi series", "iota; tighter eigenvalue enclosures", e.what());
  }
  c.alpha_hat = majorant_collapse(c.phi[0], c.phi[1]);
  const GeometricFit phi_ls = fit_geometric(c.alpha_hat, c.n0, c.n1);
  for (const auto& w : phi_ls.warnings) c.warnings.push_back("phi fit: " + w);
  for (int step = 0;; ++step) {
    c.phi_fit = step == 0 ? phi_ls : with_rate(c.alpha_hat, phi_ls, phi_ls.M.mid() * std::pow(cfg.rate_growth, step));
    c.phi_rate_steps = step;
    c.r_phi = Interval(1.0) / c.M();
    c.A = compute_A(field, c.r_phi, cfg.rho);
    const InductionCheck phi_check = verify_phi_convergence(c.A, c.flatness, c.n0, c.n1, c.alpha_hat, c.phi_fit);
    c.phi_induction = phi_check.value;
    if (phi_check.ok) break;
    if (step >= cfg.rate_steps || phi_ls.all_zero) {
      throw CertificationFailed("phi convergence", "eta, mu, n0, n1, rho, rate_steps",
                                "induction quantity " + format(phi_check.value) + " is not < 1");
    }
  }
  if (c.phi_rate_steps > 0) {
    c.warnings.push_back("phi rate raised from the least-squares value " + format(phi_ls.M) + " in " +
                         std::to_string(c.phi_rate_steps) + " steps");
  }
  c.r0 = Interval(cfg.eps_phi) * c.r_phi;
  try {
    c.K0 = compute_K0(c.alpha_hat, c.phi_fit, c.n0, c.r0);
  } catch (const Error& e) {
    throw CertificationFailed("K0", "eps_phi", e.what());
  }

  c.g_hat = solve_g_hat(field, c.alpha_hat, c.phi_fit, l, c.N_G);
  const GeometricFit g_ls = fit_geometric(c.g_hat, 2 * l - 1, c.N_G);
  for (const auto& w : g_ls.warnings) c.warnings.push_back("G fit: " + w);
  std::string g_failure;
  for (int step = 0;; ++step) {
    c.g_fit = step == 0 ? g_ls : with_rate(c.g_hat, g_ls, g_ls.M.mid() * std::pow(cfg.rate_growth, step));
    c.g_rate_steps = step;
    try {
      const InductionCheck g_check = verify_G_convergence(c.A, c.phi_fit, c.g_fit, c.alpha_hat, c.n0, c.N_G);
      c.psi_induction = g_check.value;
      if (g_check.ok) break;
      g_failure = "Psi(N_G) = " + format(g_check.value) + " is not < 1";
    } catch (const Error& e) {
      g_failure = e.what();
    }
    if (step >= cfg.rate_steps || g_ls.all_zero) {
      throw CertificationFailed("G convergence", "N_G, n0, eta, mu, rate_steps", g_failure);
    }
  }
  if (c.g_rate_steps > 0) {
    c.warnings.push_back("G rate raised from the least-squares value " + format(g_ls.M) + " in " +
                         std::to_string(c.g_rate_steps) + " steps");
  }
  c.r1 = Interval(1.0) / c.K();

  const Interval limit = kappa_limit(field.spectrum, cfg.kappa_threshold);
  for (int attempt = 0;; ++attempt) {
    c.r2 = shrink(Interval(cfg.eps_G) * c.r1, c.r2_halvings);
    c.r3 = shrink(Interval(cfg.eps) * min(c.r0, c.r2), c.r3_halvings);
    c.kappa = compute_kappa(c.D(), c.K(), l, c.r2);
    const bool kappa_ok = certainly_less(c.kappa, limit);
    const bool domain_ok = certainly_less(c.r3 + sqr(c.r3) * c.K0, c.r2) &&
                           certainly_less(c.r3, c.r0 * (Interval(1.0) - c.K0 * c.r0));
    if (kappa_ok && domain_ok) break;
    if (attempt >= cfg.retries) {
      throw CertificationFailed(kappa_ok ? "domain validity" : "kappa threshold", "eps_G, eps, retries, iota",
                                "kappa = " + format(c.kappa, 5, true) + " with r2 = " + format(c.r2, 5, true) +
                                    ", r3 = " + format(c.r3, 5, true));
    }
    if (!kappa_ok) {
      ++c.r2_halvings;
      ++c.r3_halvings;
    } else {
      ++c.r3_halvings;
    }
  }
  if (c.r2_halvings > 0 || c.r3_halvings > 0) {
    c.warnings.push_back("radii shrunk: r2 halved " + std::to_string(c.r2_halvings) + " times, r3 halved " +
                         std::to_string(c.r3_halvings) + " times");
  }
  return c;
}

}  // namespace saddlenf
