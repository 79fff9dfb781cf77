#pragma once

#include <cstdint>
#include <vector>

namespace bf::zeta {

struct Query {
  double mu = 0, mw = 0;  // target means of U and W
  double eu = 0, ew = 0;  // target means of h2(U) and h2(W)
};

struct Atom {
  double weight = 0, u = 0, w = 0;
};

struct OracleResult {
  double value = 0;
  std::vector<Atom> atoms;       // support of the returned coupling
  double residual = 0;           // max absolute moment violation
  int restarts_used = 0;
  bool feasible = false;         // residual <= 1e-6
};

// Numerically minimizes E[(U-W)(j(W)-j(U))]/2 over finitely supported
// couplings of pairs (U, W) in [0,1]^2 matching the four moment constraints
// of q plus total mass. Each restart runs a staged quadratic-penalty Nelder-Mead over a
// 7-weight / 5-interior-atom parameterization, then post-processes: comonotone
// rearrangement, duplicate merge, support reduction to at most 5 atoms, and a
// least-squares weight polish. Deterministic for fixed (q, restarts, seed).
OracleResult oracle(const Query& q, int restarts, uint64_t seed);

// Feasibility of the query itself: means interior, entropies in (0, 1), and
// e <= h2(m) on both marginals (up to slack). Throws infeasible_error/
// domain_error when violated.
void require_query_feasible(const Query& q);

double pair_cost(double u, double w);

} // namespace bf::zeta
