#pragma once

// Passing the saddle with a certificate: exit point and passage time for an
// orbit entering the box |x| <= r through the stable face |x_s| = r.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "saddlenf/errors.hpp"
#include "saddlenf/interval.hpp"
#include "saddlenf/normal_form.hpp"

namespace saddlenf {

struct EntryPoint {
  Interval x_s;
  Interval x_u;
  Interval r;
};

struct AuditEntry {
  std::string name;
  bool passed;
  std::string detail;
};

struct FlybyResult {
  int exit_side = 0;  // sign of x_u on exit
  Interval x_s_exit;
  Interval x_u_exit;
  Interval time;
  Interval R;  // normal-form box radius: the preimage of |x| <= r lies in |y| <= R
  Interval y_u;
  Interval y_s_exit;
  std::vector<AuditEntry> audit;
};

/// True when F_s vanishes on x_s = 0 and F_u on x_u = 0. Both axes are then
/// invariant and phi_i = y_i h_i, so the coordinate change perturbs each
/// coordinate by a relative amount.
inline bool axes_invariant(const DiagField& f) {
  bool ok = true;
  f.F[0].for_each([&](const MultiIndex& m, const Interval& c) { ok = ok && (m.s > 0 || is_exact_zero(c)); });
  f.F[1].for_each([&](const MultiIndex& m, const Interval& c) { ok = ok && (m.u > 0 || is_exact_zero(c)); });
  return ok;
}

/// Radii of the set |y_s| <= s, |y_u| <= u in normal-form coordinates.
struct Polydisc {
  double s = 0;
  double u = 0;
  double radius() const { return std::max(s, u); }
};

/// Error bounds for x = y + phi(y) on a polydisc. In relative mode
/// |phi_i(y)| <= H_i |y_i|, otherwise |phi_i(y)| <= K0 rho^2.
class Chart {
 public:
  explicit Chart(const Certificate& cert) : cert_(&cert), relative_(axes_invariant(cert.field)) {}

  bool relative() const { return relative_; }

  /// Certified radius for the bounds below: phi converges and the normal
  /// form estimates hold.
  Interval limit() const { return min(cert_->r0, cert_->r2); }

  double bound(Component i, const Polydisc& p) const {
    if (!certainly_less(Interval(p.radius()), limit())) {
      throw Error(ErrorKind::LeftValidityDomain, "normal-form point outside min(r0, r2)");
    }
    if (!relative_) return (cert_->K0 * sqr(Interval(p.radius()))).hi();
    const Interval rs(p.s), ru(p.u);
    Interval h;
    cert_->phi[static_cast<std::size_t>(i)].for_each([&](const MultiIndex& m, const Interval& a) {
      if (is_exact_zero(a)) return;
      const int es = m.s - (i == Component::s ? 1 : 0);
      const int eu = m.u - (i == Component::u ? 1 : 0);
      h += Interval(a.mag()) * pow(rs, es) * pow(ru, eu);
    });
    // Orders beyond the stored series follow the certified envelope C M^k.
    const Interval Mr = cert_->M() * Interval(p.radius());
    if (!(Mr.hi() < 1)) throw Error(ErrorKind::TailDiverges, "M rho must be < 1");
    h += cert_->C() * cert_->M() * pow(Mr, cert_->n1) / (Interval(1.0) - Mr);
    return h.hi();
  }

  Interval to_normal(Component i, const Interval& x, const Polydisc& p) const {
    const double b = bound(i, p);
    if (!relative_) return x + Interval(-b, b);
    if (!(b < 1)) throw Error(ErrorKind::LeftValidityDomain, "relative coordinate error must be < 1");
    return x * hull(Interval(1.0) / (Interval(1.0) + Interval(b)), Interval(1.0) / (Interval(1.0) - Interval(b)));
  }

  Interval to_original(Component i, const Interval& y, const Polydisc& p) const {
    const double b = bound(i, p);
    if (!relative_) return y + Interval(-b, b);
    return y * hull(Interval(1.0) - Interval(b), Interval(1.0) + Interval(b));
  }

  /// A polydisc containing the preimage of |x_s| <= a_s, |x_u| <= a_u:
  /// y -> x - phi(y) maps it into itself.
  Polydisc preimage(double a_s, double a_u) const {
    Polydisc p{a_s, a_u};
    for (int iter = 0; iter < 60; ++iter) {
      const double bs = bound(Component::s, p), bu = bound(Component::u, p);
      const double need_s = relative_ ? (Interval(a_s) / (Interval(1.0) - Interval(bs))).hi() : (Interval(a_s) + Interval(bs)).hi();
      const double need_u = relative_ ? (Interval(a_u) / (Interval(1.0) - Interval(bu))).hi() : (Interval(a_u) + Interval(bu)).hi();
      if ((relative_ && (bs >= 1 || bu >= 1))) break;
      if (need_s <= p.s && need_u <= p.u) return p;
      p = {std::max(p.s, need_s * (1 + 0x1p-20)), std::max(p.u, need_u * (1 + 0x1p-20))};
    }
    throw Error(ErrorKind::LeftValidityDomain, "no self-mapping polydisc for the inverse coordinate change");
  }

 private:
  const Certificate* cert_;
  bool relative_;
};

/// Radius in the diagonal coordinates inside which the bounds on phi, its
/// inverse and the normal form all hold.
inline Interval validity_radius(const Certificate& cert) {
  return min(min(cert.r0, cert.r2), cert.r0 * (Interval(1.0) - cert.K0 * cert.r0));
}

struct BoxEntry {
  Interval y_s;  // magnitude
  Interval y_u;
  int side = 0;
};

inline BoxEntry enter_box(const Chart& ch, const EntryPoint& p) {
  const Polydisc at = ch.preimage(p.x_s.mag(), p.x_u.mag());
  BoxEntry e;
  e.y_s = abs(ch.to_normal(Component::s, p.x_s, at));
  e.y_u = ch.to_normal(Component::u, p.x_u, at);
  if (e.y_u.contains_zero()) {
    throw Error(ErrorKind::StraddlesStableManifold, "unstable coordinate enclosure contains 0; exit time unbounded");
  }
  e.side = e.y_u.certainly_positive() ? 1 : -1;
  return e;
}

struct ExitEnclosure {
  Interval y_s;  // magnitude of the stable coordinate on exit
  Interval time;
};

/// Normal-form passage from (|y_s|, y_u) until |y_u| reaches `face`. The
/// rates of the normal form differ from the eigenvalues by at most kappa.
inline ExitEnclosure exit_enclosure(const Certificate& cert, const Interval& y_s, const Interval& y_u,
                                    const Interval& face) {
  const Interval& kappa = cert.kappa;
  const Interval ls = -cert.field.spectrum.lambda_s;
  const Interval& lu = cert.field.spectrum.lambda_u;
  if (!certainly_less(kappa, lu) || !certainly_less(kappa, ls)) {
    throw Error(ErrorKind::DomainError, "kappa must be smaller than both eigenvalue moduli");
  }
  if (y_u.contains_zero()) throw Error(ErrorKind::StraddlesStableManifold, "y_u encloses 0");
  const Interval a = abs(y_u);
  if (!(a.hi() < face.lo())) throw Error(ErrorKind::DomainError, "|y_u| must stay below the exit face");

  const Interval e_fast = (ls + kappa) / (lu - kappa);
  const Interval e_slow = (ls - kappa) / (lu + kappa);
  ExitEnclosure out;
  const double ys_lo =
      y_s.lo() <= 0 ? 0.0 : (Interval(y_s.lo()) * pow(Interval(a.lo()) / Interval(face.hi()), e_fast)).lo();
  const double ys_hi = (Interval(y_s.hi()) * pow(Interval(a.hi()) / Interval(face.lo()), e_slow)).hi();
  out.y_s = Interval(std::max(0.0, ys_lo), ys_hi);
  const double t_lo = (log(Interval(face.lo()) / Interval(a.hi())) / (lu + kappa)).lo();
  const double t_hi = (log(Interval(face.hi()) / Interval(a.lo())) / (lu - kappa)).hi();
  out.time = Interval(std::max(0.0, t_lo), t_hi);
  return out;
}

/// Back to the diagonal coordinates; the result must stay inside the box
/// where the bounds on phi and its inverse hold.
inline Interval exit_to_original(const Certificate& cert, const Chart& ch, const Interval& y_s_exit,
                                 const Polydisc& at) {
  const Interval x = ch.to_original(Component::s, y_s_exit, at);
  if (!certainly_less(Interval(x.mag()), validity_radius(cert))) {
    throw Error(ErrorKind::LeftValidityDomain, "exit stable coordinate leaves the validity box");
  }
  return x;
}

inline Interval intersect(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

inline FlybyResult flyby(const Certificate& cert, const EntryPoint& p) {
  FlybyResult res;
  auto audit = [&](std::string name, bool ok, std::string detail = {}) {
    res.audit.push_back({std::move(name), ok, std::move(detail)});
  };
  if (!p.r.certainly_positive()) throw Error(ErrorKind::InvalidArgument, "box radius must be positive");
  const bool r_ok = p.r.hi() <= cert.r3.lo();
  audit("r <= r3", r_ok, format(p.r, 5, true) + " vs " + format(cert.r3, 5, true));
  if (!r_ok) throw Error(ErrorKind::InvalidArgument, "entry radius exceeds the certified r3");
  const bool face_ok = abs(p.x_s) == p.r;
  audit("|x_s| = r", face_ok);
  if (!face_ok) throw Error(ErrorKind::InvalidArgument, "entry point must lie on the face |x_s| = r");
  audit("|x_u| <= r", p.x_u.mag() <= p.r.lo());
  if (p.x_u.mag() > p.r.lo()) throw Error(ErrorKind::InvalidArgument, "entry |x_u| exceeds the box radius");

  const Chart ch(cert);
  // Every point of the passage has a preimage in `box`.
  const Polydisc box = ch.preimage(p.r.hi(), p.r.hi());
  res.R = Interval(box.radius());
  audit(ch.relative() ? "axes invariant: relative coordinate change" : "additive coordinate change", true);
  audit("passage inside min(r0, r2)", true, "normal-form radius " + format(res.R, 5, true));

  const BoxEntry e = enter_box(ch, p);
  audit("y_u excludes 0", true, format(e.y_u, 5, true));
  res.y_u = e.y_u;
  res.exit_side = e.side;
  audit("kappa < min(|lambda_s|, lambda_u)",
        certainly_less(cert.kappa, min(-cert.field.spectrum.lambda_s, cert.field.spectrum.lambda_u)));

  // The orbit leaves through |x_u| = r. The normal-form image of that face
  // depends on where the exit point is, so it is refined a few times; each
  // pass only uses enclosures established by the previous one.
  Polydisc at{e.y_s.hi(), box.u};
  Interval face = abs(ch.to_normal(Component::u, p.r, at));
  ExitEnclosure ex = exit_enclosure(cert, e.y_s, e.y_u, face);
  for (int pass = 0; pass < 3; ++pass) {
    at = {std::min(at.s, ex.y_s.hi()), std::min(at.u, face.hi())};
    face = intersect(face, abs(ch.to_normal(Component::u, p.r, at)));
    const ExitEnclosure next = exit_enclosure(cert, e.y_s, e.y_u, face);
    ex = {intersect(ex.y_s, next.y_s), intersect(ex.time, next.time)};
  }
  at = {std::min(at.s, ex.y_s.hi()), std::min(at.u, face.hi())};
  res.y_s_exit = ex.y_s;
  res.time = ex.time;
  audit("passage time > 0", ex.time.lo() > 0, format(ex.time));
  if (!(ex.time.lo() > 0)) throw Error(ErrorKind::DomainError, "passage time lower bound is not positive");

  const Interval x_s = exit_to_original(cert, ch, ex.y_s, at);
  audit("exit |x_s| < min(r0, r2, r0 (1 - K0 r0))", true, format(x_s, 5, true));
  const double sign = p.x_s.certainly_negative() ? -1.0 : 1.0;
  res.x_s_exit = Interval(sign) * x_s;
  res.x_u_exit = Interval(static_cast<double>(e.side)) * p.r;
  return res;
}

struct LapRow {
  int lap = 0;
  double x_u_upper = 0;
  double lap_time_lower = 0;
  double cumulative_time_lower = 0;
};

struct LapTable {
  std::vector<LapRow> rows;
  std::string stop_reason;  // empty when all laps were completed
};

/// Iterated passages around a graphic of identical saddles related by
/// symmetry: each exit |x_s| bound is the next entry |x_u|. The caller asserts
/// that the flow outside the boxes carries exits to entries transversally
/// without increasing the distance to the graphic.
inline LapTable graphic_laps(const Certificate& cert, const Interval& r, double x_u0, int n_laps,
                             int saddles_per_lap = 4) {
  if (n_laps < 0 || saddles_per_lap < 1) throw Error(ErrorKind::InvalidArgument, "bad lap count");
  LapTable t;
  t.rows.push_back({0, x_u0, 0.0, 0.0});
  double x_u = x_u0;
  double total = 0;
  for (int lap = 1; lap <= n_laps; ++lap) {
    double lap_time = 0;
    try {
      for (int k = 0; k < saddles_per_lap; ++k) {
        const FlybyResult f = flyby(cert, {r, Interval(x_u), r});
        x_u = f.x_s_exit.mag();
        // Time lower bounds accumulate downward.
        lap_time = rounding::add_dn(lap_time, f.time.lo());
      }
    } catch (const Error& e) {
      t.stop_reason = "lap " + std::to_string(lap) + ": " + e.what();
      break;
    }
    total = rounding::add_dn(total, lap_time);
    t.rows.push_back({lap, x_u, lap_time, total});
  }
  return t;
}

}  // namespace saddlenf
