#pragma once

#include <vector>

#include "candidates.hpp"

/*
 * Averaged two-point constraints that a candidate psi must satisfy.
 * An instance is a finite mixture of coupled pairs (U_i, W_i) with
 * weights p_i; the constraint compares the mixture's mean pairwise
 * dissipation against psi evaluated at the mixture's moments.
 */
namespace bf::psi {

struct Instance {
  std::vector<double> weights;
  std::vector<double> u;
  std::vector<double> w;

  size_t size() const { return weights.size(); }
};

inline void validate_weights(const Instance& inst) {
  if (inst.size() == 0 || inst.u.size() != inst.size() || inst.w.size() != inst.size())
    throw domain_error("instance needs equal-length weights/u/w, at least one atom");
  double tot = 0;
  for (double p : inst.weights) {
    if (!(p >= 0.0)) throw domain_error("instance weights must be nonnegative");
    tot += p;
  }
  if (!(tot > 0.0)) throw domain_error("instance weights must not all vanish");
  if (std::fabs(tot - 1.0) > 1e-6)
    throw domain_error("instance weights must sum to 1 (within 1e-6)");
}

// E[(U-W)(j(W)-j(U))]/2 - [psi((EU+EW)/2, (EH2U+EH2W)/2)
//                           - (psi(EU, EH2U) + psi(EW, EH2W))/2].
// The expectation is a sum of nonnegative products, so the left side is
// nonnegative down to rounding even in float.
template <class R>
R psi_margin(const Candidate& cand, const Instance& inst) {
  if (cand.family != Family::entropy)
    throw domain_error("psi_margin needs an entropy-family candidate");
  validate_weights(inst);
  double tot = 0;
  for (double p : inst.weights) tot += p;

  R lhs(0.0), mu(0.0), mw(0.0), eu(0.0), ew(0.0);
  for (size_t i = 0; i < inst.size(); ++i) {
    double ud = inst.u[i], wd = inst.w[i];
    if (!(ud > 0.0 && ud < 1.0 && wd > 0.0 && wd < 1.0))
      throw domain_error("entropy instance coordinates must lie in (0, 1)");
    R p(inst.weights[i] / tot);
    R u(ud), w(wd);
    if (!(ud == wd)) lhs += p * ((u - w) * (kernels::j(w) - kernels::j(u)));
    mu += p * u;
    mw += p * w;
    eu += p * kernels::h2(u);
    ew += p * kernels::h2(w);
  }
  lhs = lhs * R(0.5);
  R mid = cand.eval((mu + mw) * R(0.5), (eu + ew) * R(0.5));
  R ends = (cand.eval(mu, eu) + cand.eval(mw, ew)) * R(0.5);
  return lhs - (mid - ends);
}

// Hellinger analogue on conditional means in (-1,1):
// E[(U-W)(g(U)-g(W))]/2 with g(x) = x/sqrt(1-x^2), moments (E X, E sqrt(1-X^2)).
template <class R>
R psi_h_margin(const Candidate& cand, const Instance& inst) {
  using std::sqrt;
  if (cand.family != Family::hellinger)
    throw domain_error("psi_h_margin needs a hellinger-family candidate");
  validate_weights(inst);
  double tot = 0;
  for (double p : inst.weights) tot += p;

  R lhs(0.0), mu(0.0), mw(0.0), su(0.0), sw(0.0);
  for (size_t i = 0; i < inst.size(); ++i) {
    double ud = inst.u[i], wd = inst.w[i];
    if (!(ud > -1.0 && ud < 1.0 && wd > -1.0 && wd < 1.0))
      throw domain_error("hellinger instance coordinates must lie in (-1, 1)");
    R p(inst.weights[i] / tot);
    R u(ud), w(wd);
    R ru = sqrt(R(1.0) - u * u);
    R rw = sqrt(R(1.0) - w * w);
    if (!(ud == wd)) lhs += p * ((u - w) * (u / ru - w / rw));
    mu += p * u;
    mw += p * w;
    su += p * ru;
    sw += p * rw;
  }
  lhs = lhs * R(0.5);
  R mid = cand.eval((mu + mw) * R(0.5), (su + sw) * R(0.5));
  R ends = (cand.eval(mu, su) + cand.eval(mw, sw)) * R(0.5);
  return lhs - (mid - ends);
}

// Two-point dissipation identity (su = sqrt(1-u^2)):
//   (u-w)(u/su - w/sw)/2  ==  (1 - u w - su sw)(1/su + 1/sw)/2.
// Returns both sides so callers can check the residual.
template <class R>
void two_point_sides(R u, R w, R* lhs, R* rhs) {
  using std::sqrt;
  if (!(to_double(u) > -1.0 && to_double(u) < 1.0 && to_double(w) > -1.0 &&
        to_double(w) < 1.0))
    throw domain_error("two_point_sides needs u, w in (-1, 1)");
  R su = sqrt(R(1.0) - u * u);
  R sw = sqrt(R(1.0) - w * w);
  *lhs = (u - w) * (u / su - w / sw) * R(0.5);
  *rhs = (R(1.0) - u * w - su * sw) * (R(1.0) / su + R(1.0) / sw) * R(0.5);
}

// Quadratic surrogate margin for a two-point instance in moment coordinates:
// psi_hat(a1,b1,a2,b2) = (((a1-a2)/2)^2 + ((b1-b2)/2)^2) (1/b1 + 1/b2).
template <class R>
R psi_hat_h_value(R a1, R b1, R a2, R b2) {
  if (!(to_double(b1) > 0.0 && to_double(b2) > 0.0))
    throw domain_error("psi_hat needs b1, b2 > 0");
  R da = (a1 - a2) * R(0.5);
  R db = (b1 - b2) * R(0.5);
  return (da * da + db * db) * (R(1.0) / b1 + R(1.0) / b2);
}

// Mixture dissipation minus the quadratic surrogate at the mixture moments.
// Cauchy-Schwarz makes this nonnegative for every instance.
template <class R>
R averaged_h_margin(const Instance& inst) {
  using std::sqrt;
  validate_weights(inst);
  double tot = 0;
  for (double p : inst.weights) tot += p;

  R lhs(0.0), mu(0.0), mw(0.0), su(0.0), sw(0.0);
  for (size_t i = 0; i < inst.size(); ++i) {
    double ud = inst.u[i], wd = inst.w[i];
    if (!(ud > -1.0 && ud < 1.0 && wd > -1.0 && wd < 1.0))
      throw domain_error("hellinger instance coordinates must lie in (-1, 1)");
    R p(inst.weights[i] / tot);
    R u(ud), w(wd);
    R ru = sqrt(R(1.0) - u * u);
    R rw = sqrt(R(1.0) - w * w);
    if (!(ud == wd)) lhs += p * ((u - w) * (u / ru - w / rw));
    mu += p * u;
    mw += p * w;
    su += p * ru;
    sw += p * rw;
  }
  lhs = lhs * R(0.5);
  return lhs - psi_hat_h_value(mu, su, mw, sw);
}

} // namespace bf::psi
