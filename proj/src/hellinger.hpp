#pragma once

#include <vector>

#include "errors.hpp"
#include "hypercube_flow.hpp"

/*
 * Hellinger flow companion to the entropy flow: tracks the field
 * d_x = E[F | X = x] = 1 - 2 v_x and the average r(t) = 2^-n sum sqrt(1 - d_x^2).
 */
namespace bf::hell {

inline constexpr double kClipSlack = 1e-12;

// Field of conditional means in [-1, 1]. Entries within kClipSlack of +-1
// are pulled onto the clip boundary and counted; the derivative below
// refuses clipped fields because x/sqrt(1-x^2) blows up there.
template <class R>
std::vector<R> mean_field(const flow::Predicate& p, R t, int* clipped) {
  auto v = flow::posterior_field(p, t);
  std::vector<R> d(v.size());
  int nclip = 0;
  const R lim = R(1.0) - R(kClipSlack);
  for (size_t i = 0; i < v.size(); ++i) {
    R x = R(1.0) - R(2.0) * v[i];
    if (x > lim) {
      x = lim;
      ++nclip;
    } else if (x < -lim) {
      x = -lim;
      ++nclip;
    }
    d[i] = x;
  }
  if (clipped) *clipped = nclip;
  return d;
}

template <class R>
R r_of_field(const std::vector<R>& d) {
  using std::sqrt;
  R acc(0.0);
  for (const R& x : d) acc += sqrt(R(1.0) - x * x);
  return acc / R(static_cast<double>(d.size()));
}

template <class R>
R r_value(const flow::Predicate& p, R t, int* clipped) {
  auto d = mean_field(p, t, clipped);
  return r_of_field(d);
}

// Edge sum 2^-n sum_{x~y} (d_x - d_y)(g(d_x) - g(d_y)) with g(x) = x/sqrt(1-x^2);
// g is increasing, so every term is a product of same-signed factors.
template <class R>
R r_derivative_of_field(int n, const std::vector<R>& d) {
  using std::sqrt;
  R acc(0.0);
  for (int bit = 0; bit < n; ++bit) {
    const size_t stride = size_t{1} << bit;
    for (size_t y = 0; y < d.size(); ++y) {
      if (y & stride) continue;
      const R& a = d[y];
      const R& b = d[y | stride];
      if (a == b) continue;
      R ga = a / sqrt(R(1.0) - a * a);
      R gb = b / sqrt(R(1.0) - b * b);
      acc += (a - b) * (ga - gb);
    }
  }
  return acc / R(static_cast<double>(d.size()));
}

template <class R>
R r_derivative(const flow::Predicate& p, R t) {
  int clipped = 0;
  auto d = mean_field(p, t, &clipped);
  if (clipped > 0)
    throw domain_error("mean field within " + std::to_string(kClipSlack) +
                       " of +-1 at " + std::to_string(clipped) +
                       " vertices; r'(t) is not finite there");
  return r_derivative_of_field(p.n, d);
}

template <class R>
R ef_value(const flow::Predicate& p) {
  return R(1.0) - R(2.0) * flow::mean_value<R>(p);
}

// Hellinger-capacity gap (1 - sqrt(1 - rho_t^2)) - (sqrt(1 - E[F]^2) - r(t)).
template <class R>
R conjecture2_margin(const flow::Predicate& p, R t, int* clipped) {
  using std::exp;
  using std::sqrt;
  R rho = exp(R(-2.0) * t);
  R ef = ef_value<R>(p);
  R r = r_value(p, t, clipped);
  return (R(1.0) - sqrt(R(1.0) - rho * rho)) - (sqrt(R(1.0) - ef * ef) - r);
}

} // namespace bf::hell
