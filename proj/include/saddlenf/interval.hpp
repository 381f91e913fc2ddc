#pragma once

// Outward-rounded interval arithmetic on IEEE doubles.
//
// Endpoint rounding is done in software: every elementary result is computed
// in round-to-nearest and its exact rounding error is recovered with an
// error-free transformation (TwoSum, FMA residuals). The endpoint is moved one
// ulp outward only when the error points outward, so results coincide with
// true directed rounding. Near the underflow threshold the residuals are not
// exact and the endpoint is widened unconditionally. Library transcendentals
// (exp, log) are widened by two ulps.

#include <algorithm>
#include <cfenv>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "saddlenf/errors.hpp"

namespace saddlenf {

namespace rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude FMA residuals may themselves be rounded.
inline constexpr double kTiny = 0x1p-968;

inline double down(double x) { return std::nextafter(x, -kInf); }
inline double up(double x) { return std::nextafter(x, kInf); }

inline double add_dn(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    return (std::isfinite(a) && std::isfinite(b) && s > 0) ? DBL_MAX : s;
  }
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0 ? down(s) : s;
}

inline double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    return (std::isfinite(a) && std::isfinite(b) && s < 0) ? -DBL_MAX : s;
  }
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0 ? up(s) : s;
}

inline double sub_dn(double a, double b) { return add_dn(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_dn(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  const double p = a * b;
  if (std::isinf(p)) {
    return (std::isfinite(a) && std::isfinite(b) && p > 0) ? DBL_MAX : p;
  }
  if (std::fabs(p) < kTiny) return down(p);
  const double e = std::fma(a, b, -p);
  return e < 0 ? down(p) : p;
}

inline double mul_up(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  const double p = a * b;
  if (std::isinf(p)) {
    return (std::isfinite(a) && std::isfinite(b) && p < 0) ? -DBL_MAX : p;
  }
  if (std::fabs(p) < kTiny) return up(p);
  const double e = std::fma(a, b, -p);
  return e > 0 ? up(p) : p;
}

// Sign of (exact a/b - q), from the exact remainder a - q*b.
inline int div_error_sign(double a, double b, double q) {
  const double r = std::fma(-q, b, a);
  if (r == 0) return 0;
  return ((r > 0) == (b > 0)) ? 1 : -1;
}

inline double div_dn(double a, double b) {
  if (a == 0) return 0.0;
  const double q = a / b;
  if (std::isinf(q)) {
    return (std::isfinite(a) && q > 0) ? DBL_MAX : q;
  }
  if (std::isinf(b)) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return down(q);
  return div_error_sign(a, b, q) < 0 ? down(q) : q;
}

inline double div_up(double a, double b) {
  if (a == 0) return 0.0;
  const double q = a / b;
  if (std::isinf(q)) {
    return (std::isfinite(a) && q < 0) ? -DBL_MAX : q;
  }
  if (std::isinf(b)) return 0.0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return up(q);
  return div_error_sign(a, b, q) > 0 ? up(q) : q;
}

inline double sqrt_dn(double a) {
  if (a <= 0) return 0.0;
  if (std::isinf(a)) return a;
  const double s = std::sqrt(a);
  if (a < kTiny) return down(s);
  const double r = std::fma(-s, s, a);
  return r < 0 ? down(s) : s;
}

inline double sqrt_up(double a) {
  if (a <= 0) return 0.0;
  if (std::isinf(a)) return a;
  const double s = std::sqrt(a);
  if (a < kTiny) return up(s);
  const double r = std::fma(-s, s, a);
  return r > 0 ? up(s) : s;
}

// Nonnegative base only.
inline double pow_dn(double x, unsigned n) {
  double result = 1.0;
  double base = x;
  while (n) {
    if (n & 1u) result = mul_dn(result, base);
    n >>= 1u;
    if (n) base = mul_dn(base, base);
  }
  return result;
}

inline double pow_up(double x, unsigned n) {
  double result = 1.0;
  double base = x;
  while (n) {
    if (n & 1u) result = mul_up(result, base);
    n >>= 1u;
    if (n) base = mul_up(base, base);
  }
  return result;
}

/// Restores the floating-point rounding mode on scope exit. Only used around
/// libc decimal formatting, which honours the current mode.
class ScopedRoundingMode {
 public:
  explicit ScopedRoundingMode(int mode) : saved_(std::fegetround()) { std::fesetround(mode); }
  ~ScopedRoundingMode() { std::fesetround(saved_); }
  ScopedRoundingMode(const ScopedRoundingMode&) = delete;
  ScopedRoundingMode& operator=(const ScopedRoundingMode&) = delete;

 private:
  int saved_;
};

}  // namespace rounding

class Interval {
 public:
  constexpr Interval() = default;

  /// Point interval. The argument is taken as exact.
  explicit Interval(double x) : lo_(x), hi_(x) {
    if (std::isnan(x) || std::isinf(x)) throw Error(ErrorKind::InvalidArgument, "point interval must be finite");
  }

  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == rounding::kInf || hi == -rounding::kInf) {
      throw Error(ErrorKind::InvalidArgument, "malformed interval endpoints");
    }
  }

  static Interval entire() { return Interval(-rounding::kInf, rounding::kInf); }

  /// Enclosure of a decimal literal ("-0.2", "438.4905", "1.27e-10") or of a
  /// quotient of two literals ("741.0341/3").
  static Interval from_decimal(std::string_view text);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  double mid() const noexcept {
    if (std::isinf(lo_) || std::isinf(hi_)) return std::isinf(lo_) ? (std::isinf(hi_) ? 0.0 : hi_) : lo_;
    return lo_ + 0.5 * (hi_ - lo_);
  }
  double width() const noexcept { return rounding::sub_up(hi_, lo_); }
  /// Largest absolute value over the interval.
  double mag() const noexcept { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  /// Smallest absolute value over the interval.
  double mig() const noexcept {
    if (lo_ <= 0 && hi_ >= 0) return 0.0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
  }

  bool is_point() const noexcept { return lo_ == hi_; }
  bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
  bool contains_zero() const noexcept { return lo_ <= 0 && 0 <= hi_; }
  bool subset_of(const Interval& other) const noexcept { return other.lo_ <= lo_ && hi_ <= other.hi_; }
  bool certainly_positive() const noexcept { return lo_ > 0; }
  bool certainly_negative() const noexcept { return hi_ < 0; }

  Interval operator-() const { return Interval(-hi_, -lo_); }

  Interval& operator+=(const Interval& b) {
    lo_ = rounding::add_dn(lo_, b.lo_);
    hi_ = rounding::add_up(hi_, b.hi_);
    return *this;
  }
  Interval& operator-=(const Interval& b) {
    const double lo = rounding::sub_dn(lo_, b.hi_);
    hi_ = rounding::sub_up(hi_, b.lo_);
    lo_ = lo;
    return *this;
  }
  Interval& operator*=(const Interval& b);
  Interval& operator/=(const Interval& b);

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }

  friend bool operator==(const Interval& a, const Interval& b) noexcept {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval& Interval::operator*=(const Interval& b) {
  using namespace rounding;
  const double a0 = lo_, a1 = hi_, b0 = b.lo_, b1 = b.hi_;
  const double lo = std::min({mul_dn(a0, b0), mul_dn(a0, b1), mul_dn(a1, b0), mul_dn(a1, b1)});
  const double hi = std::max({mul_up(a0, b0), mul_up(a0, b1), mul_up(a1, b0), mul_up(a1, b1)});
  lo_ = lo;
  hi_ = hi;
  return *this;
}

inline Interval& Interval::operator/=(const Interval& b) {
  using namespace rounding;
  if (b.contains_zero()) throw Error(ErrorKind::DivisionByZeroInterval, "divisor interval contains zero");
  const double a0 = lo_, a1 = hi_, b0 = b.lo_, b1 = b.hi_;
  const double lo = std::min({div_dn(a0, b0), div_dn(a0, b1), div_dn(a1, b0), div_dn(a1, b1)});
  const double hi = std::max({div_up(a0, b0), div_up(a0, b1), div_up(a1, b0), div_up(a1, b1)});
  lo_ = lo;
  hi_ = hi;
  return *this;
}

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline Interval abs(const Interval& a) { return Interval(a.mig(), a.mag()); }

inline Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

inline Interval sqr(const Interval& a) {
  const double lo = a.mig();
  const double hi = a.mag();
  return Interval(rounding::mul_dn(lo, lo), rounding::mul_up(hi, hi));
}

inline Interval sqrt(const Interval& a) {
  if (a.hi() < 0) throw Error(ErrorKind::DomainError, "sqrt of a negative interval");
  if (a.lo() < 0) throw Error(ErrorKind::DomainError, "sqrt argument interval contains negative values");
  return Interval(rounding::sqrt_dn(a.lo()), rounding::sqrt_up(a.hi()));
}

inline Interval exp(const Interval& a) {
  auto dn = [](double x) {
    if (x == 0) return 1.0;
    if (x == -rounding::kInf) return 0.0;
    return std::max(0.0, rounding::down(rounding::down(std::exp(x))));
  };
  auto up = [](double x) {
    if (x == 0) return 1.0;
    const double v = std::exp(x);
    return std::isinf(v) ? v : rounding::up(rounding::up(v));
  };
  return Interval(dn(a.lo()), up(a.hi()));
}

inline Interval log(const Interval& a) {
  if (a.lo() <= 0) throw Error(ErrorKind::DomainError, "log requires a strictly positive interval");
  auto dn = [](double x) {
    if (x == 1) return 0.0;
    return rounding::down(rounding::down(std::log(x)));
  };
  auto up = [](double x) {
    if (x == 1) return 0.0;
    const double v = std::log(x);
    return std::isinf(v) ? v : rounding::up(rounding::up(v));
  };
  return Interval(dn(a.lo()), up(a.hi()));
}

inline Interval pow(const Interval& a, int n) {
  using namespace rounding;
  if (n < 0) return Interval(1.0) / pow(a, -n);
  if (n == 0) return Interval(1.0);
  const auto un = static_cast<unsigned>(n);
  if (n % 2 == 0) return Interval(pow_dn(a.mig(), un), pow_up(a.mag(), un));
  // Odd powers are monotone.
  const double lo = a.lo() >= 0 ? pow_dn(a.lo(), un) : -pow_up(-a.lo(), un);
  const double hi = a.hi() >= 0 ? pow_up(a.hi(), un) : -pow_dn(-a.hi(), un);
  return Interval(lo, hi);
}

/// a^p = exp(p log a) for a strictly positive base.
inline Interval pow(const Interval& a, const Interval& p) {
  if (a.lo() <= 0) throw Error(ErrorKind::DomainError, "real power requires a strictly positive base");
  return exp(p * log(a));
}

/// The common ceiling of every point in the interval.
inline long long certified_ceil(const Interval& a) {
  const double c0 = std::ceil(a.lo());
  const double c1 = std::ceil(a.hi());
  if (c0 != c1) throw Error(ErrorKind::AmbiguousInteger, "ceiling differs across the interval");
  return static_cast<long long>(c0);
}

/// The common floor of every point in the interval.
inline long long certified_floor(const Interval& a) {
  const double f0 = std::floor(a.lo());
  const double f1 = std::floor(a.hi());
  if (f0 != f1) throw Error(ErrorKind::AmbiguousInteger, "floor differs across the interval");
  return static_cast<long long>(f0);
}

/// True when every point of `a` is strictly below every point of `b`.
inline bool certainly_less(const Interval& a, const Interval& b) noexcept { return a.hi() < b.lo(); }

namespace detail {

struct NormalizedDecimal {
  bool negative = false;
  std::string digits;  // no leading or trailing zeros; empty means zero
  long exponent = 0;   // value = 0.digits * 10^exponent
};

inline bool normalize_decimal(std::string_view text, NormalizedDecimal& out) {
  std::size_t i = 0;
  out = {};
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    out.negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long point_pos = -1;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
    } else if (c == '.' && point_pos < 0) {
      point_pos = static_cast<long>(digits.size());
    } else {
      break;
    }
  }
  if (!any_digit) return false;
  if (point_pos < 0) point_pos = static_cast<long>(digits.size());
  long exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    const std::string rest(text.substr(i));
    if (rest.empty()) return false;
    char* end = nullptr;
    exp10 = std::strtol(rest.c_str(), &end, 10);
    if (end == rest.c_str() || *end != '\0') return false;
    i = text.size();
  }
  if (i != text.size()) return false;
  const std::size_t first = digits.find_first_not_of('0');
  if (first == std::string::npos) {
    out.digits.clear();
    out.exponent = 0;
    return true;
  }
  const std::size_t last = digits.find_last_not_of('0');
  out.digits = digits.substr(first, last - first + 1);
  out.exponent = point_pos - static_cast<long>(first) + exp10;
  return true;
}

inline Interval enclose_literal(std::string_view text) {
  NormalizedDecimal parsed;
  if (!normalize_decimal(text, parsed)) {
    throw Error(ErrorKind::ParseError, "not a decimal literal: '" + std::string(text) + "'");
  }
  const std::string buffer(text);
  const double nearest = std::strtod(buffer.c_str(), nullptr);
  if (std::isinf(nearest)) {
    return nearest > 0 ? Interval(DBL_MAX, rounding::kInf) : Interval(-rounding::kInf, -DBL_MAX);
  }
  // The exact decimal expansion of a double has at most 767 significant digits.
  char exact[1100];
  std::snprintf(exact, sizeof exact, "%.800e", nearest);
  NormalizedDecimal back;
  normalize_decimal(exact, back);
  const bool same_zero = parsed.digits.empty() && back.digits.empty();
  if (same_zero || (parsed.digits == back.digits && parsed.exponent == back.exponent &&
                    parsed.negative == back.negative)) {
    return Interval(nearest);
  }
  return Interval(rounding::down(nearest), rounding::up(nearest));
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline Interval Interval::from_decimal(std::string_view text) {
  const std::string t = detail::trim(text);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return detail::enclose_literal(t);
  const Interval num = detail::enclose_literal(detail::trim(std::string_view(t).substr(0, slash)));
  const Interval den = detail::enclose_literal(detail::trim(std::string_view(t).substr(slash + 1)));
  return num / den;
}

/// Round-trip text for one endpoint: strtod of the result returns `x` exactly.
inline std::string exact_string(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_exact(std::string_view text) {
  const std::string t = detail::trim(text);
  if (t == "inf" || t == "+inf") return rounding::kInf;
  if (t == "-inf") return -rounding::kInf;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw Error(ErrorKind::ParseError, "not a number: '" + t + "'");
  return v;
}

/// "[lo, hi]" with `digits` significant digits, lower endpoint rounded down
/// and upper endpoint rounded up, so the printed interval encloses `a`.
inline std::string format(const Interval& a, int digits = 5, bool scientific = false) {
  auto one = [&](double x, int mode) {
    if (std::isinf(x)) return std::string(x > 0 ? "inf" : "-inf");
    char buf[64];
    rounding::ScopedRoundingMode guard(mode);
    if (scientific) {
      std::snprintf(buf, sizeof buf, "%.*E", std::max(digits - 1, 0), x);
    } else {
      std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    }
    return std::string(buf);
  };
  return "[" + one(a.lo(), FE_DOWNWARD) + "," + one(a.hi(), FE_UPWARD) + "]";
}

/// Machine-readable "[lo,hi]" with round-trip endpoints.
inline std::string exact_format(const Interval& a) {
  return "[" + exact_string(a.lo()) + "," + exact_string(a.hi()) + "]";
}

inline Interval parse_exact_interval(std::string_view text) {
  const std::string t = detail::trim(text);
  if (t.size() < 5 || t.front() != '[' || t.back() != ']') {
    throw Error(ErrorKind::ParseError, "expected [lo,hi]: '" + t + "'");
  }
  const auto comma = t.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::ParseError, "expected [lo,hi]: '" + t + "'");
  return Interval(parse_exact(t.substr(1, comma - 1)), parse_exact(t.substr(comma + 1, t.size() - comma - 2)));
}

inline std::ostream& operator<<(std::ostream& os, const Interval& a) { return os << format(a, 17); }

}  // namespace saddlenf
