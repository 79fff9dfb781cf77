#include "ode_bound.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "quadrature.hpp"
#include "scalar_kernels.hpp"

namespace bf::flow {

namespace {

/*
 * The time integral is taken in u-space, gamma = h2(u) with u in (0, 1/2]:
 *
 *   t(x) = integral_{u0}^{x} j(u) du / phi(mean, h2(u)).
 *
 * Written this way phi never needs h2_inv: eta(h2(u)) = (1-2u) j(u)
 * directly, and the inner root r = solve_r(mean, h2(u)) = h2(v) with
 * v = L_inv(2 h2(u) / |1-2m|), so eta(r) = (1-2v) j(v). Near the cap the
 * naive gamma-space integrand 1/phi(mean, gamma) needs h2_inv at exactly
 * the arguments where its bisection error blows up relative to phi -> 0;
 * the u-space form keeps the balanced-mean integrand exactly 1/(1-2u),
 * noise-free all the way in, and the singular endpoint min(m, 1-m) is a
 * representable number instead of an inverse image.
 */
struct Integrand {
  double d = 0;     // |1 - 2 mean|
  bool skew = false;

  // phi(mean, h2(u)) for u in (0, min(m,1-m))
  double phi_at(double u) const {
    double a = (1.0 - 2.0 * u) * kernels::j(u);
    if (!skew) return a;
    double v = kernels::big_l_inv(2.0 * kernels::h2(u) / d);
    if (!(v > 0.0 && v < 0.5)) return a;
    double b = kernels::h2(u) / kernels::h2(v) * (1.0 - 2.0 * v) * kernels::j(v);
    return a - b;
  }

  double operator()(double u) const { return kernels::j(u) / phi_at(u); }

  // For a skew mean the two eta terms cancel toward the cap, which floors
  // the achievable accuracy of a segment at roughly its integrated mass
  // times the roundoff of that cancellation relative to phi. The quadrature
  // tolerance must sit above that floor (with room to spare, since the
  // roundoff estimate is itself a few-ulp guess) or the subdivision never
  // terminates.
  double noise_floor(double a, double b) const {
    double ju = kernels::j(b);
    double lead = (1.0 - 2.0 * b) * ju;
    double ph = phi_at(b);
    if (!(ph > 0.0)) return 1.0;
    return (b - a) * ju / ph * (4e-15 * lead / ph);
  }
};

} // namespace

OdeResult ode_lower_bound(double mean, double gamma0, double t) {
  if (!(gamma0 > 0.0 && gamma0 < 1.0))
    throw domain_error("ode_lower_bound needs gamma0 in (0, 1)");
  if (!(t >= 0.0)) throw domain_error("ode_lower_bound needs t >= 0");
  const double cap = kernels::h2(mean);
  if (gamma0 >= cap || t == 0.0) return {gamma0, false};

  Integrand f;
  f.d = std::fabs(1.0 - 2.0 * mean);
  f.skew = f.d > 0.0;

  const double u_cap = std::min(mean, 1.0 - mean);
  const double u0 = kernels::h2_inv(gamma0);
  const double gap = u_cap - u0;
  const double seg_tol = 2e-13;

  auto segment = [&](double a, double b) {
    double tol = std::max(seg_tol, f.noise_floor(a, b));
    return adaptive_simpson(f, a, b, tol);
  };

  // March the upper endpoint toward u_cap, reusing already-integrated
  // mass: no segment is integrated twice and none touches the singular
  // endpoint. A skew mean stops once cancellation noise caps what another
  // factor-of-two step could resolve, leaving gamma within ~1e-6 of the
  // cap; a balanced mean marches the full dyadic ladder.
  double anchor = u0;
  double acc = 0.0;
  double lo = u0, lo_acc = 0.0;
  bool bracketed = false;
  double hi = u_cap;
  for (int k = 1; k <= 70; ++k) {
    double x = u_cap - gap * std::ldexp(1.0, -k);
    if (x >= u_cap) break; // dyadic step rounded away: out of representable room
    if (x <= anchor) continue;
    if (f.skew && f.noise_floor(anchor, x) > 1e-9) break;
    acc += segment(anchor, x);
    anchor = x;
    if (acc >= t) {
      hi = x;
      bracketed = true;
      break;
    }
    lo = x;
    lo_acc = acc;
  }
  if (!bracketed) return {cap, true};

  // Bisect on u with the integral accumulated from the moving left anchor.
  double glo = lo_acc;
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double gm = glo + segment(lo, mid);
    if (gm < t) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return {kernels::h2(0.5 * (lo + hi)), false};
}

} // namespace bf::flow
