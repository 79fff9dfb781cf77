#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar_kernels.hpp"

/*
 * Candidate lower-bound functions psi(a, b) for the two flow classes.
 *
 * Entropy family: a = P(F=-1) marginal in (0,1), b = conditional entropy;
 * the class demands psi >= 0, psi(a,b) = 0 whenever h2(a) <= b, and
 * symmetry psi(1-a, b) = psi(a, b).
 *
 * Hellinger family: a = conditional mean in (-1,1), b = E[sqrt(1-u^2)];
 * zero region sqrt(1-a^2) <= b, symmetry in a -> -a.
 */
namespace bf::psi {

enum class Family { entropy, hellinger };

enum class Kind { phi, eta_guess, zero, hell_natural, hell_zero, grid };

struct Candidate {
  Family family = Family::entropy;
  Kind kind = Kind::phi;
  std::string name;

  // grid payload: values on a regular (na x nb) lattice, row-major in a.
  double a_lo = 0, a_hi = 0, b_lo = 0, b_hi = 0;
  int na = 0, nb = 0;
  std::vector<double> values;

  template <class R>
  R eval(R a, R b) const;
};

// name is a built-in ("phi", "eta-guess", "zero", "hellinger-natural",
// "hellinger-zero") or a path to a grid candidate file.
Candidate open_candidate(const std::string& name);
Candidate load_grid(const std::string& path);

namespace detail {

template <class R>
R bilinear(const Candidate& c, double a, double b) {
  auto cell = [](double x, double lo, double hi, int n) {
    double u = (x - lo) / (hi - lo) * (n - 1);
    if (u < 0) u = 0;
    if (u > n - 1) u = n - 1;
    int i = static_cast<int>(u);
    if (i > n - 2) i = n - 2;
    return std::pair<int, double>(i, u - i);
  };
  auto [ia, fa] = cell(a, c.a_lo, c.a_hi, c.na);
  auto [ib, fb] = cell(b, c.b_lo, c.b_hi, c.nb);
  auto at = [&](int i, int j) { return c.values[size_t(i) * c.nb + j]; };
  double v00 = at(ia, ib), v01 = at(ia, ib + 1);
  double v10 = at(ia + 1, ib), v11 = at(ia + 1, ib + 1);
  double v = (1 - fa) * ((1 - fb) * v00 + fb * v01) + fa * ((1 - fb) * v10 + fb * v11);
  return R(v < 0 ? 0.0 : v);
}

} // namespace detail

template <class R>
R Candidate::eval(R a, R b) const {
  using std::fabs;
  switch (kind) {
    case Kind::phi:
      return kernels::phi(a, b);
    case Kind::eta_guess: {
      // eta(1 - h2(a) + b), clamped into eta's domain; the clamp at 1
      // realizes the required zero region since eta(1) = 0.
      R arg = R(1.0) - kernels::h2(a) + b;
      if (arg >= R(1.0)) return R(0.0);
      if (!(to_double(arg) > 0.0))
        throw domain_error("eta-guess argument fell to 0; b must be positive");
      return kernels::eta(arg);
    }
    case Kind::zero:
      return R(0.0);
    case Kind::hell_natural: {
      // (1 - a^2 - b^2)/b, zero once sqrt(1-a^2) <= b.
      if (!(to_double(a) > -1.0 && to_double(a) < 1.0))
        throw domain_error("hellinger candidate needs a in (-1, 1)");
      R num = R(1.0) - a * a - b * b;
      if (!(to_double(num) > 0.0)) return R(0.0);
      if (!(to_double(b) > 0.0))
        throw domain_error("hellinger candidate needs b > 0 outside the zero region");
      return num / b;
    }
    case Kind::hell_zero:
      return R(0.0);
    case Kind::grid: {
      // Symmetry and the zero region are enforced here so grid files
      // cannot step outside the candidate class.
      double ad = to_double(a), bd = to_double(b);
      if (family == Family::entropy) {
        if (ad > 0.5) ad = 1.0 - ad;
        if (to_double(kernels::h2(ad)) <= bd) return R(0.0);
      } else {
        ad = fabs(ad);
        if (1.0 - ad * ad <= bd * bd) return R(0.0);
      }
      return detail::bilinear<R>(*this, ad, bd);
    }
  }
  throw domain_error("unreachable candidate kind");
}

} // namespace bf::psi
