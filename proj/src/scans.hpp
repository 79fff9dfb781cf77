#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "candidates.hpp"
#include "hypercube_flow.hpp"
#include "report.hpp"

/*
 * Randomized counterexample scans and exhaustive small-n sweeps. Every scan
 * draws sample i from substream(seed, salt, i), keeps worker-local top-K
 * worst margins merged by (margin, index), optionally polishes the survivors
 * with Nelder-Mead in a bijective reparameterization, and classifies the
 * final minimum with the shared double-double escalation policy. Reports are
 * byte-identical for a fixed seed regardless of the job count.
 */
namespace bf::scan {

struct Config {
  uint64_t seed = 0;
  int64_t samples = 100000;
  int jobs = 1;
  double tol = 1e-9;
  bool refine = true;
  int refine_top_k = 10;
  int refine_iters = 200;
};

// Averaged-constraint membership scan for a candidate psi (both families).
// check_id "scan-c3" additionally cross-checks a confirmed-negative argmin
// against the coupling oracle.
report::Json scan_membership(const psi::Candidate& cand, const Config& cfg,
                             const std::string& check_id);

// Reflection asymmetry and entropy-coordinate midpoint convexity of the
// two-point gap kappa, plus a fixed-grid Hessian diagnostic.
report::Json scan_c4(const Config& cfg);

// Averaged lower-bound margin over random feasible quadruples.
report::Json scan_c5(const Config& cfg);

// Exhaustive sweep over n-bit predicates (n <= 4) and a t grid.
// margin_kind: 0 = capacity gap (conjectured), 1 = derivative bound (theorem).
report::Json sweep_flow(int n, double eps, bool balanced_only, int margin_kind,
                        const std::vector<double>& ts, int jobs);

// Per-t tables for a single predicate: entropy flow (columns t, p_t, gamma,
// dgamma, mi, margin) and Hellinger flow (t, rho_t, r, dr, margin).
report::Json flow_trace(const flow::Predicate& p, const std::vector<double>& ts,
                        const std::string& source, double eps);
report::Json hellinger_trace(const flow::Predicate& p, const std::vector<double>& ts,
                             const std::string& source, double eps);

report::Json appendix_report(const std::string& which, uint64_t seed, int jobs);

// Lower bound vs. oracle for one moment quadruple.
report::Json zeta_query_report(double mu, double mw, double eu, double ew,
                               int restarts, uint64_t seed);

// Compares the coupling oracle against the closed-form symmetric slice on a
// grid x grid lattice of feasible (m, e) and measures how far the returned
// support sits from the three-atom optimal structure.
report::Json zeta_grid_report(int grid, int restarts, uint64_t seed, int jobs);

// Re-evaluates a previously emitted argmin replay file. cand may be null for
// instance kinds that need no candidate (c4/c5).
report::Json replay_file(const std::string& path, const psi::Candidate* cand,
                         double tol);

// The argmin replay payload embedded in a report ("" when none) and the
// file extension it should be written with.
std::string replay_payload(const report::Json& rep);
std::string replay_extension(const report::Json& rep);

} // namespace bf::scan
