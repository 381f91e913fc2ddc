#pragma once

// Bringing a polynomial planar field with a saddle into diagonal form
//   x' = diag(lambda_s, lambda_u) x + F(x),   F = O(|x|^2).

#include <array>
#include <map>
#include <string>
#include <utility>

#include "saddlenf/errors.hpp"
#include "saddlenf/interval.hpp"
#include "saddlenf/series.hpp"

namespace saddlenf {

/// Sparse polynomial with interval coefficients.
using Polynomial = std::map<MultiIndex, Interval>;

inline int degree_of(const Polynomial& p) {
  int d = 0;
  for (const auto& [m, c] : p) {
    if (!is_exact_zero(c)) d = std::max(d, m.order());
  }
  return d;
}

inline Series2 to_series(const Polynomial& p, int degree) {
  Series2 out(degree);
  for (const auto& [m, c] : p) {
    if (m.order() > degree) {
      if (!is_exact_zero(c)) throw Error(ErrorKind::InvalidArgument, "polynomial exceeds the series degree");
      continue;
    }
    out.at(m) += c;
  }
  return out;
}

/// Polynomial field in the user's coordinates, with an enclosure of a fixed
/// point.
struct RawField {
  std::array<Polynomial, 2> components;
  std::array<Interval, 2> fixed_point{};
};

struct Spectrum {
  Interval lambda_s;
  Interval lambda_u;
};

/// x' = Lambda x + F(x) with Lambda = diag(lambda_s, lambda_u) and F of order >= 2.
struct DiagField {
  Spectrum spectrum;
  SeriesPair<Interval> F{Series2(2), Series2(2)};

  int degree() const { return F[0].degree(); }

  void validate() const {
    if (!spectrum.lambda_s.certainly_negative() || !spectrum.lambda_u.certainly_positive()) {
      throw Error(ErrorKind::NotASaddle, "need lambda_s < 0 < lambda_u");
    }
    if (F[0].degree() != F[1].degree()) throw Error(ErrorKind::InvalidArgument, "F components differ in degree");
    for (const auto& f : F) {
      if (f.valuation() < 2) throw Error(ErrorKind::InvalidArgument, "F must have no constant or linear terms");
    }
  }

  bool is_linear() const { return F[0].is_zero() && F[1].is_zero(); }
};

inline DiagField make_diag_field(Spectrum spectrum, const std::array<Polynomial, 2>& nonlinear) {
  const int d = std::max({2, degree_of(nonlinear[0]), degree_of(nonlinear[1])});
  DiagField f{spectrum, {to_series(nonlinear[0], d), to_series(nonlinear[1], d)}};
  f.validate();
  return f;
}

using Matrix2 = std::array<std::array<Interval, 2>, 2>;

inline Matrix2 identity_matrix() {
  return {{{Interval(1.0), Interval(0.0)}, {Interval(0.0), Interval(1.0)}}};
}

inline Interval determinant(const Matrix2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

inline Matrix2 inverse(const Matrix2& a) {
  const Interval det = determinant(a);
  if (det.contains_zero()) throw Error(ErrorKind::SingularTransform, "matrix determinant encloses zero");
  return {{{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}}};
}

inline Matrix2 jacobian_at_origin(const RawField& raw) {
  auto coeff = [&](int i, MultiIndex m) {
    const auto& p = raw.components[static_cast<std::size_t>(i)];
    const auto it = p.find(m);
    return it == p.end() ? Interval{} : it->second;
  };
  return {{{coeff(0, {1, 0}), coeff(0, {0, 1})}, {coeff(1, {1, 0}), coeff(1, {0, 1})}}};
}

namespace detail {

inline Interval binomial(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return Interval(b);  // exact for the small orders used here
}

}  // namespace detail

/// Re-centre the polynomial at the enclosed fixed point.
inline RawField translate(const RawField& raw) {
  const auto& [a, b] = raw.fixed_point;
  if (std::isinf(a.lo()) || std::isinf(a.hi()) || std::isinf(b.lo()) || std::isinf(b.hi())) {
    throw Error(ErrorKind::InvalidArgument, "fixed point must be finite");
  }
  RawField out;
  out.fixed_point = {Interval{}, Interval{}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (const auto& [m, c] : raw.components[i]) {
      for (int p = 0; p <= m.s; ++p) {
        for (int q = 0; q <= m.u; ++q) {
          const Interval term = c * detail::binomial(m.s, p) * detail::binomial(m.u, q) * pow(a, m.s - p) *
                                pow(b, m.u - q);
          auto [it, inserted] = out.components[i].try_emplace(MultiIndex{p, q}, term);
          if (!inserted) it->second += term;
        }
      }
    }
    const auto it = out.components[i].find(MultiIndex{0, 0});
    if (it != out.components[i].end() && !it->second.contains_zero()) {
      throw Error(ErrorKind::NotAFixedPoint,
                  "field value at the fixed point excludes zero in component " + std::to_string(i));
    }
  }
  return out;
}

struct EigenEnclosure {
  Spectrum spectrum;
  /// Columns are the stable and unstable eigenvectors, x = T xi.
  Matrix2 T = identity_matrix();
  bool exact_identity = true;
};

/// Eigenvalues and eigenvectors of a 2x2 interval matrix with a certified
/// saddle sign pattern.
inline EigenEnclosure eigen_enclose(const Matrix2& J) {
  const Interval& a = J[0][0];
  const Interval& b = J[0][1];
  const Interval& c = J[1][0];
  const Interval& d = J[1][1];
  EigenEnclosure out;
  if (is_exact_zero(b) && is_exact_zero(c)) {
    if (a.certainly_negative() && d.certainly_positive()) {
      out.spectrum = {a, d};
      return out;
    }
    if (d.certainly_negative() && a.certainly_positive()) {
      out.spectrum = {d, a};
      out.T = {{{Interval(0.0), Interval(1.0)}, {Interval(1.0), Interval(0.0)}}};
      out.exact_identity = false;
      return out;
    }
    throw Error(ErrorKind::NotASaddle, "diagonal entries do not have certified opposite signs");
  }
  const Interval det = a * d - b * c;
  if (!det.certainly_negative()) {
    throw Error(ErrorKind::NotASaddle, "Jacobian determinant is not certified negative");
  }
  const Interval tr = a + d;
  const Interval disc = sqr(a - d) + Interval(4.0) * b * c;
  if (!disc.certainly_positive()) throw Error(ErrorKind::NotASaddle, "discriminant not certified positive");
  const Interval root = sqrt(disc);
  Interval lu = (tr + root) / Interval(2.0);
  Interval ls = (tr - root) / Interval(2.0);
  // The product of the roots is det; use it to tighten the root that suffers
  // from cancellation.
  if (tr.lo() >= 0) {
    const Interval alt = det / lu;
    ls = Interval(std::max(ls.lo(), alt.lo()), std::min(ls.hi(), alt.hi()));
  } else if (tr.hi() <= 0) {
    const Interval alt = det / ls;
    lu = Interval(std::max(lu.lo(), alt.lo()), std::min(lu.hi(), alt.hi()));
  }
  if (!ls.certainly_negative() || !lu.certainly_positive()) {
    throw Error(ErrorKind::NotASaddle, "eigenvalue signs could not be certified");
  }
  out.spectrum = {ls, lu};

  auto eigenvector = [&](const Interval& lambda) -> std::array<Interval, 2> {
    // (J - lambda I) v = 0 gives v = (b, lambda - a) or (lambda - d, c).
    std::array<Interval, 2> v1{b, lambda - a};
    std::array<Interval, 2> v2{lambda - d, c};
    auto size = [](const std::array<Interval, 2>& v) { return std::max(v[0].mig(), v[1].mig()); };
    std::array<Interval, 2> v = size(v1) >= size(v2) ? v1 : v2;
    const std::size_t big = v[0].mig() >= v[1].mig() ? 0 : 1;
    if (v[big].contains_zero()) throw Error(ErrorKind::SingularTransform, "eigenvector could not be normalised");
    const Interval scale = v[big];
    v[big] = Interval(1.0);
    v[1 - big] = v[1 - big] / scale;
    return v;
  };
  const auto vs = eigenvector(ls);
  const auto vu = eigenvector(lu);
  out.T = {{{vs[0], vu[0]}, {vs[1], vu[1]}}};
  out.exact_identity = false;
  if (determinant(out.T).contains_zero()) {
    throw Error(ErrorKind::SingularTransform, "eigenvector matrix determinant encloses zero");
  }
  return out;
}

/// Translate (if needed), diagonalise with x = T xi and return the field in
/// eigen-coordinates. Dropped constant and linear residues are verified to
/// enclose zero.
inline DiagField diagonalize(const RawField& raw_in) {
  const bool at_origin = is_exact_zero(raw_in.fixed_point[0]) && is_exact_zero(raw_in.fixed_point[1]);
  const RawField raw = at_origin ? raw_in : translate(raw_in);
  const auto eig = eigen_enclose(jacobian_at_origin(raw));
  const int d = std::max({2, degree_of(raw.components[0]), degree_of(raw.components[1])});

  SeriesPair<Interval> G{to_series(raw.components[0], d), to_series(raw.components[1], d)};
  if (!eig.exact_identity) {
    const Matrix2& T = eig.T;
    const Matrix2 Tinv = inverse(T);
    const auto xs = T[0][0] * Series2::variable(Component::s, d) + T[0][1] * Series2::variable(Component::u, d);
    const auto xu = T[1][0] * Series2::variable(Component::s, d) + T[1][1] * Series2::variable(Component::u, d);
    const auto Ps = compose(G[0], xs, xu, d);
    const auto Pu = compose(G[1], xs, xu, d);
    G[0] = Tinv[0][0] * Ps + Tinv[0][1] * Pu;
    G[1] = Tinv[1][0] * Ps + Tinv[1][1] * Pu;
  }

  const std::array<Interval, 2> diag{eig.spectrum.lambda_s, eig.spectrum.lambda_u};
  DiagField out;
  out.spectrum = eig.spectrum;
  out.F = {Series2(d), Series2(d)};
  for (std::size_t i = 0; i < 2; ++i) {
    G[i].for_each([&](const MultiIndex& m, const Interval& c) {
      if (m.order() >= 2) {
        out.F[i].at(m) = c;
        return;
      }
      if (m.order() == 0) {
        if (!c.contains_zero()) throw Error(ErrorKind::ResidualLinearTerms, "constant term excludes zero");
        return;
      }
      const bool diagonal = (i == 0 && m.s == 1) || (i == 1 && m.u == 1);
      if (diagonal) {
        if (c.hi() < diag[i].lo() || c.lo() > diag[i].hi()) {
          throw Error(ErrorKind::ResidualLinearTerms, "diagonal entry inconsistent with eigenvalue enclosure");
        }
      } else if (!c.contains_zero()) {
        throw Error(ErrorKind::ResidualLinearTerms, "off-diagonal linear term excludes zero");
      }
    });
  }
  out.validate();
  return out;
}

}  // namespace saddlenf
