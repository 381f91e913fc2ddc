#pragma once

// Order of flatness, the lower bound on small divisors, and the
// divisors themselves.

#include <cmath>

#include "saddlenf/errors.hpp"
#include "saddlenf/interval.hpp"
#include "saddlenf/saddle_prep.hpp"
#include "saddlenf/series.hpp"

namespace saddlenf {

struct FlatnessData {
  int l = 2;
  /// First i with i*ratio possibly integral (0 when none up to iota - 1).
  int resonance_order = 0;
  long long N_l = 0;
  /// Smallest and largest eigenvalue modulus.
  Interval lambda_check;
  Interval lambda_hat;
};

namespace detail {

inline bool excludes_integers(const Interval& x) { return std::ceil(x.lo()) > x.hi(); }

}  // namespace detail

struct FlatnessOrder {
  int l;
  int resonance_order;
};

/// Largest l <= iota such that i*(-ls/lu) and i*(lu/-ls) certifiably avoid
/// the integers for i = 1..l-1.
inline FlatnessOrder flatness_order(const Interval& lambda_s, const Interval& lambda_u, int iota) {
  if (iota < 2) throw Error(ErrorKind::InvalidArgument, "iota must be at least 2");
  if (!lambda_s.certainly_negative() || !lambda_u.certainly_positive()) {
    throw Error(ErrorKind::NotASaddle, "need lambda_s < 0 < lambda_u");
  }
  const Interval ratio_su = -lambda_s / lambda_u;
  const Interval ratio_us = lambda_u / -lambda_s;
  for (int i = 1; i < iota; ++i) {
    const Interval k(static_cast<double>(i));
    if (!detail::excludes_integers(k * ratio_su) || !detail::excludes_integers(k * ratio_us)) {
      if (i == 1) throw Error(ErrorKind::NoFlatOrder, "|lambda_s| and lambda_u cannot be separated");
      return {i, i};
    }
  }
  return {iota, 0};
}

/// N(l) = l + ceil((l-1) |lambda_hat / lambda_check|).
inline long long compute_N(int l, const Interval& lambda_check, const Interval& lambda_hat) {
  return l + certified_ceil(Interval(static_cast<double>(l - 1)) * lambda_hat / lambda_check);
}

inline FlatnessData flatness(const Spectrum& spec, int iota) {
  const auto [l, res] = flatness_order(spec.lambda_s, spec.lambda_u, iota);
  FlatnessData fd;
  fd.l = l;
  fd.resonance_order = res;
  const Interval as = -spec.lambda_s;
  const Interval& au = spec.lambda_u;
  if (certainly_less(as, au)) {
    fd.lambda_check = as;
    fd.lambda_hat = au;
  } else if (certainly_less(au, as)) {
    fd.lambda_check = au;
    fd.lambda_hat = as;
  } else {
    throw Error(ErrorKind::NoFlatOrder, "cannot order |lambda_s| and lambda_u");
  }
  fd.N_l = compute_N(l, fd.lambda_check, fd.lambda_hat);
  return fd;
}

/// Lower bound |(k-l) lambda_check + (l-1) lambda_hat| on |m lambda - lambda_i|
/// for m in V_l with |m| = k >= N(l). The two eigenvalues have opposite
/// signs, so with moduli this reads |(k-l)|lambda_check| - (l-1)|lambda_hat||.
inline Interval omega(long long k, const FlatnessData& fd) {
  if (k < fd.N_l) throw Error(ErrorKind::InvalidRegime, "omega requires k >= N(l)");
  const Interval v = Interval(static_cast<double>(k - fd.l)) * fd.lambda_check -
                     Interval(static_cast<double>(fd.l - 1)) * fd.lambda_hat;
  return abs(v);
}

/// m_s lambda_s + m_u lambda_u - lambda_i.
inline Interval divisor(const MultiIndex& m, Component i, const Spectrum& spec) {
  const Interval v = Interval(static_cast<double>(m.s)) * spec.lambda_s +
                     Interval(static_cast<double>(m.u)) * spec.lambda_u -
                     (i == Component::s ? spec.lambda_s : spec.lambda_u);
  if (v.contains_zero()) throw Error(ErrorKind::ResonantDivisor, "small divisor encloses zero");
  return v;
}

}  // namespace saddlenf
