#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace bf {

/*
 * Unevaluated double-double: value = hi + lo with |lo| <= ulp(hi)/2.
 * Gives ~31 decimal digits, enough to re-evaluate a suspicious margin
 * far below the double noise floor. Only the operations the margin
 * evaluators need are provided.
 */
struct Dd {
  double hi = 0.0;
  double lo = 0.0;

  constexpr Dd() = default;
  constexpr Dd(double h) : hi(h), lo(0.0) {}
  constexpr Dd(double h, double l) : hi(h), lo(l) {}
};

namespace detail {

inline Dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

// requires |a| >= |b|
inline Dd quick_two_sum(double a, double b) {
  double s = a + b;
  double err = b - (s - a);
  return {s, err};
}

inline Dd two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return {p, err};
}

} // namespace detail

inline Dd operator+(Dd a, Dd b) {
  Dd s = detail::two_sum(a.hi, b.hi);
  Dd t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline Dd operator-(Dd a) { return {-a.hi, -a.lo}; }
inline Dd operator-(Dd a, Dd b) { return a + (-b); }

inline Dd operator*(Dd a, Dd b) {
  Dd p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline Dd operator/(Dd a, Dd b) {
  double q1 = a.hi / b.hi;
  Dd r = a - Dd(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - Dd(q2) * b;
  double q3 = r.hi / b.hi;
  Dd q = detail::quick_two_sum(q1, q2);
  return q + Dd(q3);
}

inline Dd& operator+=(Dd& a, Dd b) { return a = a + b; }
inline Dd& operator-=(Dd& a, Dd b) { return a = a - b; }
inline Dd& operator*=(Dd& a, Dd b) { return a = a * b; }
inline Dd& operator/=(Dd& a, Dd b) { return a = a / b; }

inline bool operator==(Dd a, Dd b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(Dd a, Dd b) { return !(a == b); }
inline bool operator<(Dd a, Dd b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(Dd a, Dd b) { return b < a; }
inline bool operator<=(Dd a, Dd b) { return !(b < a); }
inline bool operator>=(Dd a, Dd b) { return !(a < b); }

inline double to_double(Dd a) { return a.hi + a.lo; }
inline double to_double(double a) { return a; }

inline Dd fabs(Dd a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

inline Dd ldexp(Dd a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }

inline Dd sqrt(Dd a) {
  if (a.hi == 0.0 && a.lo == 0.0) return Dd(0.0);
  // Karp's method: one Newton correction on the double estimate.
  double x = 1.0 / std::sqrt(a.hi);
  double ax = a.hi * x;
  Dd err = a - Dd(ax) * Dd(ax);
  return detail::quick_two_sum(ax, err.hi * (x * 0.5));
}

inline constexpr Dd dd_ln2{6.93147180559945286e-01, 2.31904681384629956e-17};

inline Dd exp(Dd a) {
  if (a.hi > 709.0) return Dd(std::numeric_limits<double>::infinity());
  if (a.hi < -709.0) return Dd(0.0);
  // a = m*ln2 + r, exp(r) by scaled Taylor series plus repeated squaring.
  double m = std::floor(a.hi / dd_ln2.hi + 0.5);
  Dd r = a - dd_ln2 * Dd(m);
  r = ldexp(r, -9); // |r| <= ln2/1024
  // expm1(r) via Taylor; terms decay fast at this magnitude.
  Dd s = r;
  Dd term = r;
  for (int k = 2; k <= 16; ++k) {
    term = term * r / Dd(static_cast<double>(k));
    s += term;
    if (std::fabs(term.hi) < 1e-35) break;
  }
  // undo the scaling: expm1(2x) = 2*expm1(x) + expm1(x)^2
  for (int i = 0; i < 9; ++i) s = ldexp(s, 1) + s * s;
  return ldexp(s + Dd(1.0), static_cast<int>(m));
}

inline Dd log(Dd a) {
  // double estimate refined with two Newton steps: y += a*exp(-y) - 1
  Dd y(std::log(a.hi));
  for (int i = 0; i < 2; ++i) y += a * exp(-y) - Dd(1.0);
  return y;
}

inline Dd log2(Dd a) { return log(a) / dd_ln2; }

inline Dd expm1(Dd a) {
  // only needed for moderate arguments; the naive form is fine there
  return exp(a) - Dd(1.0);
}

} // namespace bf
