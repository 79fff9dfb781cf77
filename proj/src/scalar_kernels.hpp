#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "double_double.hpp"
#include "errors.hpp"

/*
 * Scalar kernels in base-2 entropy units, templated on the real type so
 * every margin can be re-evaluated in double-double when a scan minimum
 * needs escalation. Unqualified math calls resolve via ADL for Dd and
 * via the using-declarations for double.
 *
 *   h2        binary entropy
 *   h2_inv    inverse of h2 on [0, 1/2], bracketed bisection
 *   j         log-likelihood-ratio kernel  log2((1-p)/p)
 *   d2        binary KL divergence
 *   big_l     L(u) = 2*h2(u)/(1-2u), odd extension of the slope function
 *   eta       (1-2*h2_inv(x)) * j(h2_inv(x))
 *   solve_r   root of r/(1-2*h2_inv(r)) = y/|1-2x|
 *   phi       explicit candidate for the maximal flow-bound function
 *   kappa     gap between the symmetrized-KL two-point term and its
 *             perspective lower bound
 */
namespace bf::kernels {

template <class R>
struct traits;

template <>
struct traits<double> {
  static double bisect_width() { return 1e-13; }
};

template <>
struct traits<Dd> {
  static Dd bisect_width() { return Dd(1e-31); }
};

// Inputs within 1e-15 of a boundary snap onto it; anything further out
// is a caller bug and is rejected.
inline constexpr double kBoundarySlack = 1e-15;

template <class R>
R clamp01(R p, const char* who) {
  double d = to_double(p);
  if (d < 0.0) {
    if (d >= -kBoundarySlack) return R(0.0);
    throw domain_error(std::string(who) + ": argument below 0");
  }
  if (d > 1.0) {
    if (d <= 1.0 + kBoundarySlack) return R(1.0);
    throw domain_error(std::string(who) + ": argument above 1");
  }
  return p;
}

template <class R>
R h2(R p_in) {
  R p = clamp01(p_in, "h2");
  if (p == R(0.0) || p == R(1.0)) return R(0.0);
  using std::log2;
  R q = R(1.0) - p;
  return -(p * log2(p)) - q * log2(q);
}

template <class R>
R j(R p);

template <class R>
R h2_inv(R y_in) {
  R y = clamp01(y_in, "h2_inv");
  if (y == R(0.0)) return R(0.0);
  if (y == R(1.0)) return R(0.5);
  R lo(0.0), hi(0.5);
  for (int it = 0; it < 200 && hi - lo > R(1e-6) * hi; ++it) {
    R mid = (lo + hi) * R(0.5);
    if (mid <= lo || mid >= hi) break;
    if (h2(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  // Safeguarded Newton with h2' = j: quadratic once the bracket is tight,
  // and a step that escapes the bracket falls back to its midpoint (which
  // is all that happens near y = 1, where j vanishes and plain bisection
  // is the right tool anyway).
  const R width = traits<R>::bisect_width();
  R s = (lo + hi) * R(0.5);
  for (int it = 0; it < 120 && hi - lo > width * hi; ++it) {
    R g = h2(s) - y;
    if (to_double(g) < 0.0)
      lo = s;
    else
      hi = s;
    R next = s - g / j(s);
    if (!(next > lo) || !(next < hi)) next = (lo + hi) * R(0.5);
    if (next == s) break;
    s = next;
  }
  return s;
}

template <class R>
R j(R p) {
  double d = to_double(p);
  if (!(d > 0.0 && d < 1.0)) throw domain_error("j: argument outside (0,1)");
  using std::log2;
  return log2(R(1.0) - p) - log2(p);
}

template <class R>
R d2(R x_in, R y) {
  R x = clamp01(x_in, "d2");
  double dy = to_double(y);
  if (!(dy > 0.0 && dy < 1.0))
    throw domain_error("d2: reference probability outside (0,1)");
  using std::log2;
  R acc(0.0);
  if (!(x == R(0.0))) acc += x * (log2(x) - log2(y));
  if (!(x == R(1.0))) {
    R xq = R(1.0) - x, yq = R(1.0) - y;
    acc += xq * (log2(xq) - log2(yq));
  }
  return acc;
}

template <class R>
R eta(R x_in) {
  R x = clamp01(x_in, "eta");
  if (to_double(x) <= 0.0) throw domain_error("eta: argument outside (0,1]");
  if (x == R(1.0)) return R(0.0);
  R v = h2_inv(x);
  return (R(1.0) - R(2.0) * v) * j(v);
}

template <class R>
R big_l(R u_in) {
  double d = to_double(u_in);
  R u = u_in;
  if (d < 0.0) {
    if (d < -kBoundarySlack) throw domain_error("big_l: argument below 0");
    u = R(0.0);
  } else if (d > 0.5) {
    if (d > 0.5 + kBoundarySlack) throw domain_error("big_l: argument above 1/2");
    u = R(0.5);
  }
  if (u == R(0.0)) return R(0.0);
  if (u == R(0.5)) return R(std::numeric_limits<double>::infinity());
  return R(2.0) * h2(u) / (R(1.0) - R(2.0) * u);
}

template <class R>
R big_l_inv(R x_in) {
  R x = x_in;
  double d = to_double(x);
  if (d < 0.0) {
    if (d < -kBoundarySlack) throw domain_error("big_l_inv: argument below 0");
    x = R(0.0);
    d = 0.0;
  }
  if (d == 0.0) return R(0.0);
  if (std::isinf(d)) return R(0.5);
  // Bisect in s = 1-2u; G(s) = 2*h2((1-s)/2)/s decreases from +inf to 0,
  // and the relative stopping rule keeps u accurate right up to 1/2.
  auto G = [](R s) { return R(2.0) * h2((R(1.0) - s) * R(0.5)) / s; };
  R shi(1.0), slo(0.5);
  while (G(slo) < x) {
    shi = slo;
    slo = slo * R(0.5);
    if (to_double(slo) < 1e-300) return R(0.5);
  }
  for (int it = 0; it < 60 && shi - slo > R(1e-6) * shi; ++it) {
    R mid = (slo + shi) * R(0.5);
    if (mid <= slo || mid >= shi) break;
    if (G(mid) >= x)
      slo = mid;
    else
      shi = mid;
  }
  // Safeguarded Newton from the coarse bracket. G is smooth and strictly
  // decreasing, so the corrections converge quadratically and land the root
  // at roundoff rather than at the bisection width; a step that leaves the
  // bracket falls back to its midpoint.
  const R width = traits<R>::bisect_width();
  R s = (slo + shi) * R(0.5);
  for (int it = 0; it < 120 && shi - slo > width * shi; ++it) {
    R u = (R(1.0) - s) * R(0.5);
    R hu = h2(u);
    R g = R(2.0) * hu / s - x;
    if (to_double(g) >= 0.0)
      slo = s;
    else
      shi = s;
    R dg = -(s * j(u) + R(2.0) * hu) / (s * s);
    R next = s - g / dg;
    if (!(next > slo) || !(next < shi)) next = (slo + shi) * R(0.5);
    if (next == s) break;
    s = next;
  }
  return (R(1.0) - s) * R(0.5);
}

template <class R>
R binary_conv(R a, R b) {
  return a * (R(1.0) - b) + (R(1.0) - a) * b;
}

template <class R>
R crossover(R t) {
  if constexpr (std::is_same_v<R, double>) {
    return -std::expm1(-2.0 * t) * 0.5;
  } else {
    return (R(1.0) - exp(R(-2.0) * t)) * R(0.5);
  }
}

template <class R>
R solve_r(R x_in, R y) {
  R x = clamp01(x_in, "solve_r");
  if (!(to_double(y) > 0.0)) throw domain_error("solve_r: y must be positive");
  using std::fabs;
  R d = fabs(R(1.0) - R(2.0) * x);
  if (to_double(d) == 0.0) return R(1.0);
  return h2(big_l_inv(R(2.0) * y / d));
}

template <class R>
R phi(R x_in, R y_in) {
  R x = clamp01(x_in, "phi");
  R y = y_in;
  double dy = to_double(y);
  if (dy < 0.0) {
    if (dy < -kBoundarySlack) throw domain_error("phi: negative second argument");
    y = R(0.0);
    dy = 0.0;
  }
  if (h2(x) <= y) return R(0.0);
  if (dy == 0.0) throw domain_error("phi: zero second argument at interior x");
  R e_y = eta(y);
  R r = solve_r(x, y);
  if (r == R(1.0)) return e_y;
  return e_y - (y / r) * eta(r);
}

template <class R>
R zeta_symmetric(R m, R e) {
  return phi(R(0.5), e) - phi(m, e);
}

// Returns 0 whenever |u-w| < 1e-9: the two-point gap is quadratic across
// the diagonal and evaluating the perspective term there only amplifies
// cancellation noise.
template <class R>
R kappa(R u, R w) {
  double du = to_double(u), dw = to_double(w);
  if (std::fabs(du - dw) < 1e-9) {
    if (!(du >= -kBoundarySlack && du <= 1.0 + kBoundarySlack))
      throw domain_error("kappa: argument outside [0,1]");
    return R(0.0);
  }
  if (!(du > 0.0 && du < 1.0 && dw > 0.0 && dw < 1.0))
    throw domain_error("kappa: arguments must be interior when u != w");
  using std::fabs;
  R diff = u - w;
  R adiff = fabs(diff);
  R lhs = diff * (j(w) - j(u)) * R(0.5);
  R arg = (h2(u) + h2(w)) / adiff;
  return lhs - adiff * j(big_l_inv(arg));
}

template <class R>
void require_feasible_quadruple(R mu, R mw, R eu, R ew) {
  double deu = to_double(eu), dew = to_double(ew);
  if (!(deu > 0.0 && deu < 1.0 && dew > 0.0 && dew < 1.0))
    throw domain_error("zeta bound: entropy moments must be interior");
  if (to_double(h2(mu)) < deu - 1e-12 || to_double(h2(mw)) < dew - 1e-12)
    throw infeasible_error("zeta bound: moment quadruple violates h2(m) >= e");
}

template <class R>
R zeta_lower_bound(R mu_in, R mw_in, R eu, R ew) {
  R mu = clamp01(mu_in, "zeta_lower_bound");
  R mw = clamp01(mw_in, "zeta_lower_bound");
  require_feasible_quadruple(mu, mw, eu, ew);
  using std::fabs;
  R hu = h2_inv(eu), hw = h2_inv(ew);
  R mid = (eu + ew) * R(0.5);
  R t1 = phi((R(1.0) - fabs(hu - hw)) * R(0.5), mid);
  R t2 = (hu == hw) ? R(0.0) : (hu - hw) * (j(hw) - j(hu)) * R(0.5);
  R t3 = phi((R(1.0) - fabs(mu - mw)) * R(0.5), mid);
  return t1 + t2 - t3;
}

// Midpoint gap the four-moment lower bound must dominate. The margin is
// exactly invariant under m -> 1-m on either argument (the bound's
// |mu-mw| term and the midpoint term swap), so inputs are normalized
// into [0, 1/2].
template <class R>
R conjecture5_margin(R mu_in, R mw_in, R eu, R ew) {
  R mu = clamp01(mu_in, "conjecture5_margin");
  R mw = clamp01(mw_in, "conjecture5_margin");
  if (to_double(mu) > 0.5) mu = R(1.0) - mu;
  if (to_double(mw) > 0.5) mw = R(1.0) - mw;
  R lhs = zeta_lower_bound(mu, mw, eu, ew);
  R mid = (eu + ew) * R(0.5);
  R rhs = phi((mu + mw) * R(0.5), mid) - (phi(mu, eu) + phi(mw, ew)) * R(0.5);
  return lhs - rhs;
}

template <class R>
R c4_reflection_margin(R u, R w) {
  double du = to_double(u), dw = to_double(w);
  if (!(du > 0.0 && du <= 0.5 && dw > 0.0 && dw <= 0.5))
    throw domain_error("c4_reflection_margin: arguments outside (0,1/2]");
  return kappa(R(1.0) - u, w) - kappa(u, w);
}

template <class R>
R kappa_entropy_coords(R a, R b) {
  return kappa(h2_inv(a), h2_inv(b));
}

template <class R>
R c4_midpoint_margin(R a1, R b1, R a2, R b2) {
  for (double v : {to_double(a1), to_double(b1), to_double(a2), to_double(b2)})
    if (!(v > 0.0 && v < 1.0))
      throw domain_error("c4_midpoint_margin: arguments outside (0,1)");
  R f1 = kappa_entropy_coords(a1, b1);
  R f2 = kappa_entropy_coords(a2, b2);
  R fm = kappa_entropy_coords((a1 + a2) * R(0.5), (b1 + b2) * R(0.5));
  return (f1 + f2) * R(0.5) - fm;
}

} // namespace bf::kernels
