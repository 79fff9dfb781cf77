#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalar_kernels.hpp"

/*
 * Heat flow of a soft predicate on the hypercube {-1,1}^n through the
 * BSC semigroup p_t = (1 - e^{-2t})/2.
 *
 * Vertex indexing: bit i-1 of the index is set iff coordinate x_i = -1,
 * so index 0 is the all-(+1) vertex. A predicate stores
 * v[x] = P(F = -1 | X = x).
 */
namespace bf::flow {

struct Predicate {
  int n = 0;
  std::vector<double> v;

  size_t size() const { return v.size(); }
};

Predicate make_named(const std::string& name, int n, double eps);
Predicate from_mask(int n, uint64_t mask, double eps);
Predicate read_file(const std::string& path, double eps);
Predicate soften(const Predicate& p, double eps);
std::string to_file_text(const Predicate& p);

void validate(const Predicate& p);

// One in-place one-coordinate convolution per axis: O(n 2^n).
template <class R>
std::vector<R> posterior_field(const Predicate& p, R t) {
  const size_t sz = p.size();
  std::vector<R> v(sz);
  for (size_t i = 0; i < sz; ++i) v[i] = R(p.v[i]);
  if (!(to_double(t) > 0.0)) return v;
  R pt = kernels::crossover(t);
  R q = R(1.0) - pt;
  for (int bit = 0; bit < p.n; ++bit) {
    const size_t stride = size_t{1} << bit;
    for (size_t y = 0; y < sz; ++y) {
      if (y & stride) continue;
      R a = v[y], b = v[y | stride];
      v[y] = q * a + pt * b;
      v[y | stride] = q * b + pt * a;
    }
  }
  return v;
}

template <class R>
R mean_value(const Predicate& p) {
  R acc(0.0);
  for (double x : p.v) acc += R(x);
  return acc / R(static_cast<double>(p.size()));
}

template <class R>
R gamma_of_field(const std::vector<R>& v) {
  R acc(0.0);
  for (const R& x : v) acc += kernels::h2(x);
  return acc / R(static_cast<double>(v.size()));
}

template <class R>
R gamma(const Predicate& p, R t) {
  auto v = posterior_field(p, t);
  return gamma_of_field(v);
}

// Exact derivative of the entropy flow: the edge sum
//   2^-n * sum_{x~y} (v_x - v_y)(j(v_y) - j(v_x)),
// each unordered edge counted once. Every term is a product of two
// same-signed factors, so the result is nonnegative down to the last ulp.
template <class R>
R gamma_derivative_of_field(int n, const std::vector<R>& v) {
  R acc(0.0);
  for (int bit = 0; bit < n; ++bit) {
    const size_t stride = size_t{1} << bit;
    for (size_t y = 0; y < v.size(); ++y) {
      if (y & stride) continue;
      const R& a = v[y];
      const R& b = v[y | stride];
      if (a == b) continue;
      acc += (a - b) * (kernels::j(b) - kernels::j(a));
    }
  }
  return acc / R(static_cast<double>(v.size()));
}

template <class R>
R gamma_derivative(const Predicate& p, R t) {
  auto v = posterior_field(p, t);
  return gamma_derivative_of_field(p.n, v);
}

template <class R>
R mutual_information(const Predicate& p, R t) {
  return kernels::h2(mean_value<R>(p)) - gamma(p, t);
}

// Channel-capacity gap (1 - h2(p_t)) - I(F; Y_t).
template <class R>
R conjecture1_margin(const Predicate& p, R t) {
  return (R(1.0) - kernels::h2(kernels::crossover(t))) - mutual_information(p, t);
}

// Flow-derivative gap dgamma/dt - phi(P(F=-1), gamma(t)).
template <class R>
R derivative_bound_margin(const Predicate& p, R t) {
  auto v = posterior_field(p, t);
  R g = gamma_of_field(v);
  R dg = gamma_derivative_of_field(p.n, v);
  return dg - kernels::phi(mean_value<R>(p), g);
}

std::vector<double> log_t_grid(int points, double t_min, double t_max);

} // namespace bf::flow
