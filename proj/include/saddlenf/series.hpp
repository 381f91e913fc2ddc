#pragma once

// Bivariate truncated power series ("Taylor models" without remainder terms)
// and univariate majorant series.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <vector>

#include "saddlenf/errors.hpp"
#include "saddlenf/interval.hpp"

namespace saddlenf {

/// Exponent pair (m_s, m_u) of the monomial x_s^m_s x_u^m_u.
struct MultiIndex {
  int s = 0;
  int u = 0;

  constexpr int order() const noexcept { return s + u; }
  friend constexpr auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Which coordinate (equation) of the planar system.
enum class Component { s = 0, u = 1 };

/// V_l: some exponent below l.  U_l: both exponents at least l.
enum class FilterSet { V, U };

inline bool in_filter(const MultiIndex& m, int l, FilterSet which) noexcept {
  if (m.order() < 2) return false;
  const bool in_u = m.s >= l && m.u >= l;
  return which == FilterSet::U ? in_u : !in_u;
}

inline bool is_exact_zero(const Interval& x) noexcept { return x.lo() == 0 && x.hi() == 0; }

template <class T>
bool is_exact_zero(const T& x) {
  return x == T{};
}

/// Dense triangular storage of the coefficients with total order <= degree.
template <class T>
class TruncatedSeries2 {
 public:
  TruncatedSeries2() : TruncatedSeries2(0) {}
  explicit TruncatedSeries2(int degree) : degree_(degree) {
    if (degree < 0) throw Error(ErrorKind::InvalidArgument, "series degree must be nonnegative");
    coeffs_.assign(slot(0, degree + 1), T{});
  }

  static TruncatedSeries2 variable(Component c, int degree) {
    TruncatedSeries2 x(degree);
    if (degree >= 1) x.at(c == Component::s ? MultiIndex{1, 0} : MultiIndex{0, 1}) = T(1.0);
    return x;
  }

  int degree() const noexcept { return degree_; }

  const T& operator[](const MultiIndex& m) const { return coeffs_[checked_slot(m)]; }
  T& at(const MultiIndex& m) { return coeffs_[checked_slot(m)]; }

  /// Coefficient, or exact zero beyond the truncation degree.
  T coeff(const MultiIndex& m) const {
    if (m.s < 0 || m.u < 0 || m.order() > degree_) return T{};
    return coeffs_[slot(m.s, m.u)];
  }

  /// Visit every stored coefficient in order of increasing total order.
  template <class F>
  void for_each(F&& f) const {
    for (int k = 0; k <= degree_; ++k) {
      for (int mu = 0; mu <= k; ++mu) f(MultiIndex{k - mu, mu}, coeffs_[slot(k - mu, mu)]);
    }
  }

  template <class F>
  void for_each_order(int k, F&& f) const {
    if (k < 0 || k > degree_) return;
    for (int mu = 0; mu <= k; ++mu) f(MultiIndex{k - mu, mu}, coeffs_[slot(k - mu, mu)]);
  }

  TruncatedSeries2 truncated(int degree) const {
    TruncatedSeries2 out(degree);
    const int d = std::min(degree, degree_);
    std::copy(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(slot(0, d + 1)), out.coeffs_.begin());
    return out;
  }

  /// Lowest order carrying a coefficient that is not exactly zero
  /// (degree + 1 for the zero series).
  int valuation() const {
    for (int k = 0; k <= degree_; ++k) {
      for (int mu = 0; mu <= k; ++mu) {
        if (!is_exact_zero(coeffs_[slot(k - mu, mu)])) return k;
      }
    }
    return degree_ + 1;
  }

  bool is_zero() const { return valuation() > degree_; }

  TruncatedSeries2& operator+=(const TruncatedSeries2& b) {
    *this = *this + b;
    return *this;
  }

  friend TruncatedSeries2 operator+(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    TruncatedSeries2 out(std::min(a.degree_, b.degree_));
    for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
    return out;
  }

  friend TruncatedSeries2 operator-(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    TruncatedSeries2 out(std::min(a.degree_, b.degree_));
    for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
    return out;
  }

  friend TruncatedSeries2 operator*(const T& scalar, TruncatedSeries2 a) {
    for (auto& c : a.coeffs_) c = scalar * c;
    return a;
  }

  /// Product truncated at min(deg a, deg b); never creates higher orders.
  friend TruncatedSeries2 operator*(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    const int d = std::min(a.degree_, b.degree_);
    TruncatedSeries2 out(d);
    const int va = a.valuation();
    const int vb = b.valuation();
    for (int i = va; i <= d - vb; ++i) {
      for (int ai = 0; ai <= i; ++ai) {
        const T& ca = a.coeffs_[slot(i - ai, ai)];
        if (is_exact_zero(ca)) continue;
        for (int j = vb; j <= d - i; ++j) {
          for (int bj = 0; bj <= j; ++bj) {
            const T& cb = b.coeffs_[slot(j - bj, bj)];
            if (is_exact_zero(cb)) continue;
            out.coeffs_[slot(i - ai + j - bj, ai + bj)] += ca * cb;
          }
        }
      }
    }
    return out;
  }

 private:
  static std::size_t slot(int ms, int mu) {
    const auto k = static_cast<std::size_t>(ms + mu);
    return k * (k + 1) / 2 + static_cast<std::size_t>(mu);
  }

  std::size_t checked_slot(const MultiIndex& m) const {
    if (m.s < 0 || m.u < 0 || m.order() > degree_) {
      throw Error(ErrorKind::InvalidArgument, "multi-index outside the truncation degree");
    }
    return slot(m.s, m.u);
  }

  int degree_;
  std::vector<T> coeffs_;
};

using Series2 = TruncatedSeries2<Interval>;

/// A pair of series, one per component (s, u).
template <class T>
using SeriesPair = std::array<TruncatedSeries2<T>, 2>;

/// Keep the coefficients whose multi-index lies in V_l or U_l (orders >= 2).
template <class T>
TruncatedSeries2<T> filter(const TruncatedSeries2<T>& a, int l, FilterSet which) {
  if (l < 1) throw Error(ErrorKind::InvalidArgument, "filter order must be at least 1");
  TruncatedSeries2<T> out(a.degree());
  a.for_each([&](const MultiIndex& m, const T& c) {
    if (in_filter(m, l, which)) out.at(m) = c;
  });
  return out;
}

/// Degree-k truncation of f(w_s, w_u) for a polynomial f.
template <class T>
TruncatedSeries2<T> compose(const TruncatedSeries2<T>& f, const TruncatedSeries2<T>& ws,
                            const TruncatedSeries2<T>& wu, int k) {
  TruncatedSeries2<T> result(k);
  int max_s = 0, max_u = 0;
  f.for_each([&](const MultiIndex& m, const T& c) {
    if (is_exact_zero(c)) return;
    max_s = std::max(max_s, m.s);
    max_u = std::max(max_u, m.u);
  });
  std::vector<TruncatedSeries2<T>> pow_s{TruncatedSeries2<T>(k)}, pow_u{TruncatedSeries2<T>(k)};
  pow_s[0].at({0, 0}) = T(1.0);
  pow_u[0].at({0, 0}) = T(1.0);
  const auto ws_k = ws.truncated(k);
  const auto wu_k = wu.truncated(k);
  for (int i = 1; i <= max_s; ++i) pow_s.push_back(pow_s.back() * ws_k);
  for (int i = 1; i <= max_u; ++i) pow_u.push_back(pow_u.back() * wu_k);
  f.for_each([&](const MultiIndex& m, const T& c) {
    if (is_exact_zero(c)) return;
    result += c * (pow_s[static_cast<std::size_t>(m.s)] * pow_u[static_cast<std::size_t>(m.u)]);
  });
  return result;
}

/// Degree-k truncation of f_i(x + phi(x)); phi must start at order 2.
template <class T>
TruncatedSeries2<T> compose_shift(const TruncatedSeries2<T>& f, const SeriesPair<T>& phi, int k) {
  for (const auto& p : phi) {
    if (p.valuation() < 2) throw Error(ErrorKind::InvalidArgument, "shift must have no terms below order 2");
  }
  const auto ws = TruncatedSeries2<T>::variable(Component::s, k) + phi[0].truncated(k);
  const auto wu = TruncatedSeries2<T>::variable(Component::u, k) + phi[1].truncated(k);
  return compose(f, ws, wu, k);
}

/// Univariate series with nonnegative coefficients, indexed by order.
class MajorantSeries1 {
 public:
  MajorantSeries1() = default;
  explicit MajorantSeries1(int degree) : coeffs_(static_cast<std::size_t>(degree + 1)) {
    if (degree < 0) throw Error(ErrorKind::InvalidArgument, "series degree must be nonnegative");
  }
  explicit MajorantSeries1(std::vector<Interval> coeffs) : coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
      if (c.lo() < 0) throw Error(ErrorKind::InvalidArgument, "majorant coefficients must be nonnegative");
    }
  }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Interval>& coeffs() const noexcept { return coeffs_; }

  Interval operator[](int k) const {
    if (k < 0 || k > degree()) return Interval{};
    return coeffs_[static_cast<std::size_t>(k)];
  }

  void set(int k, const Interval& v) {
    if (k < 0 || k > degree()) throw Error(ErrorKind::InvalidArgument, "order outside the majorant degree");
    if (v.lo() < 0) throw Error(ErrorKind::InvalidArgument, "majorant coefficients must be nonnegative");
    coeffs_[static_cast<std::size_t>(k)] = v;
  }

  MajorantSeries1 truncated(int degree) const {
    MajorantSeries1 out(degree);
    for (int k = 0; k <= std::min(degree, this->degree()); ++k) out.coeffs_[static_cast<std::size_t>(k)] = (*this)[k];
    return out;
  }

  friend MajorantSeries1 operator+(const MajorantSeries1& a, const MajorantSeries1& b) {
    MajorantSeries1 out(std::min(a.degree(), b.degree()));
    for (int k = 0; k <= out.degree(); ++k) out.coeffs_[static_cast<std::size_t>(k)] = a[k] + b[k];
    return out;
  }

  friend MajorantSeries1 operator*(const MajorantSeries1& a, const MajorantSeries1& b) {
    MajorantSeries1 out(std::min(a.degree(), b.degree()));
    for (int i = 0; i <= out.degree(); ++i) {
      if (is_exact_zero(a[i])) continue;
      for (int j = 0; i + j <= out.degree(); ++j) {
        out.coeffs_[static_cast<std::size_t>(i + j)] += a[i] * b[j];
      }
    }
    return out;
  }

  /// Formal derivative: coefficient k*a_k moves to order k-1.
  MajorantSeries1 derivative() const {
    MajorantSeries1 out(std::max(degree() - 1, 0));
    for (int k = 1; k <= degree(); ++k) {
      out.coeffs_[static_cast<std::size_t>(k - 1)] = Interval(static_cast<double>(k)) * (*this)[k];
    }
    return out;
  }

  /// Degree-d truncation of f(w) for a polynomial f (this) and series w.
  MajorantSeries1 compose(const MajorantSeries1& w, int d) const {
    MajorantSeries1 result(d);
    MajorantSeries1 power(d);
    power.coeffs_[0] = Interval(1.0);
    const auto wd = w.truncated(d);
    for (int k = 0; k <= degree(); ++k) {
      if (k > 0) power = power * wd;
      if (is_exact_zero((*this)[k])) continue;
      for (int j = 0; j <= d; ++j) result.coeffs_[static_cast<std::size_t>(j)] += (*this)[k] * power[j];
    }
    return result;
  }

 private:
  std::vector<Interval> coeffs_;
};

/// Order-k coefficient bounds sum_{|m|=k} max(|a_s,m|, |a_u,m|).
inline MajorantSeries1 majorant_collapse(const Series2& a_s, const Series2& a_u) {
  if (a_s.degree() != a_u.degree()) throw Error(ErrorKind::InvalidArgument, "majorant collapse needs equal degrees");
  MajorantSeries1 out(a_s.degree());
  for (int k = 0; k <= a_s.degree(); ++k) {
    Interval sum;
    a_s.for_each_order(k, [&](const MultiIndex& m, const Interval& c) {
      const double bound = std::max(c.mag(), a_u[m].mag());
      if (bound > 0) sum += Interval(bound);
    });
    out.set(k, sum);
  }
  return out;
}

inline MajorantSeries1 deriv_weighted(const MajorantSeries1& a) { return a.derivative(); }

}  // namespace saddlenf
