#pragma once

namespace bf::flow {

struct OdeResult {
  double value = 0;
  bool saturated = false;
};

// Solves the comparison ODE gamma'(s) = phi(mean, gamma(s)), gamma(0) = gamma0,
// and returns gamma(t). Equivalently inverts
//   G(x) = integral_{gamma0}^{x} du / phi(mean, u) = t
// for x in (gamma0, h2(mean)). If gamma0 >= h2(mean) the flow is already at
// its cap and gamma0 is returned; `saturated` flags x indistinguishable from
// the cap at the marching resolution (the cap's double-precision
// neighborhood for a balanced mean, within ~1e-6 for skew means, where the
// integrand's cancellation noise floors what quadrature can resolve).
OdeResult ode_lower_bound(double mean, double gamma0, double t);

} // namespace bf::flow
