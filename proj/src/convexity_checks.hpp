#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classify.hpp"
#include "scalar_kernels.hpp"

/*
 * Scalar inequality checks backing the curvature facts the bounds rest on:
 * convexity of j(L^-1(.)), monotonicity of its ratio, joint convexity of its
 * perspective, nonnegativity of the auxiliary f(b), and the surd identity
 * for the two-point entropy gap. All are theorems, so a confirmed negative
 * classifies as theorem-violation.
 */
namespace bf::conv {

template <class R>
R jlinv(R x) {
  return kernels::j(kernels::big_l_inv(x));
}

// Midpoint convexity gap of j(L^-1(.)).
template <class R>
R jlinv_midpoint_margin(R x1, R x2) {
  return (jlinv(x1) + jlinv(x2)) * R(0.5) - jlinv((x1 + x2) * R(0.5));
}

// t(u) = -ln u - ln(1-u) - 4u^2 + 4u - 1, nonnegative on (0, 1/2]; its
// positivity is what makes j(L^-1(.)) convex.
template <class R>
R jlinv_curvature_margin(R u) {
  using std::log;
  return -log(u) - log(R(1.0) - u) - R(4.0) * u * u + R(4.0) * u - R(1.0);
}

// g(x) = j(L^-1(x))/x evaluated on a decreasing pair: g(x_lo) - g(x_hi).
template <class R>
R ratio_margin(R x_lo, R x_hi) {
  return jlinv(x_lo) / x_lo - jlinv(x_hi) / x_hi;
}

// Perspective |x| j(L^-1(y/|x|)); 0 on the x = 0 slice (the recession
// value, since j(L^-1(z)) -> 0 as z -> inf).
template <class R>
R perspective(R x, R y) {
  using std::fabs;
  R ax = fabs(x);
  if (!(to_double(ax) > 0.0)) return R(0.0);
  return ax * jlinv(y / ax);
}

template <class R>
R perspective_midpoint_margin(R x1, R y1, R x2, R y2) {
  return (perspective(x1, y1) + perspective(x2, y2)) * R(0.5) -
         perspective((x1 + x2) * R(0.5), (y1 + y2) * R(0.5));
}

// f(b) = (1+b)^2 ln(1+b) - b^2 ln b - b ln b - 2b ln 4 on (0, 1];
// satisfies b^2 f(1/b) = f(b) and vanishes only at b in {0, 1}.
template <class R>
R fb_margin(R b) {
  using std::log;
  R one(1.0);
  return (one + b) * (one + b) * log(one + b) - b * b * log(b) - b * log(b) -
         R(2.0) * b * log(R(4.0));
}

// For u >= w in (0,1), z = sqrt(w(1-u)) / (sqrt(w(1-u)) + sqrt(u(1-w)))
// lies in (0, 1/2] and satisfies j(z) = (j(w) - j(u))/2 exactly.
template <class R>
void z_identity_sides(R u, R w, R* lhs, R* rhs) {
  using std::sqrt;
  if (!(to_double(u) > 0.0 && to_double(u) < 1.0 && to_double(w) > 0.0 &&
        to_double(w) < 1.0 && to_double(u) >= to_double(w)))
    throw domain_error("z identity needs 1 > u >= w > 0");
  R su = sqrt(w * (R(1.0) - u));
  R sw = sqrt(u * (R(1.0) - w));
  R z = su / (su + sw);
  *lhs = kernels::j(z);
  *rhs = (kernels::j(w) - kernels::j(u)) * R(0.5);
}

template <class R>
R z_identity_margin(R u, R w) {
  using std::fabs;
  R lhs, rhs;
  z_identity_sides(u, w, &lhs, &rhs);
  return -fabs(lhs - rhs);
}

struct CheckOutcome {
  std::string name;
  int64_t samples = 0;
  double min_margin = 0;
  std::string argmin_kind;          // sub-check tag ("pair", "grid", ...)
  std::vector<double> argmin;       // worst point's parameters
  double tolerance = 0;
  Classification verdict;
};

const std::vector<std::string>& check_names();

CheckOutcome run_check(const std::string& name, uint64_t seed, int jobs);

// which = "all" or a comma-separated subset of check_names().
std::vector<CheckOutcome> run_checks(const std::string& which, uint64_t seed, int jobs);

} // namespace bf::conv
