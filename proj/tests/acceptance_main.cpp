// Release gate. Each numbered criterion prints exactly one PASS/FAIL line
// with the measured quantity, its pinned tolerance, and the wall time; the
// process exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <boolflow/boolflow.h>

#include "rng.hpp"

namespace {

namespace fs = std::filesystem;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rep_num(bf_report* rep, const char* path) {
  double v = std::nan("");
  if (rep) bf_report_get_number(rep, path, &v);
  return v;
}

std::string rep_cls(bf_report* rep) {
  char* s = nullptr;
  std::string out = "<none>";
  if (rep && bf_report_classification(rep, &s) == BF_OK) {
    out = s;
    bf_string_free(s);
  }
  return out;
}

std::string rep_json(bf_report* rep) {
  char* s = nullptr;
  std::string out;
  if (rep && bf_report_serialize(rep, 0, &s) == BF_OK) {
    out = s;
    bf_string_free(s);
  }
  return out;
}

struct Gate {
  int failures = 0;

  void run(int idx, const char* name, bool (*fn)(std::string&)) {
    std::string detail;
    auto t0 = clock_type::now();
    bool ok = fn(detail);
    double dt = seconds_since(t0);
    std::printf("[%s] %2d %-28s %s  [%.3f s]\n", ok ? "PASS" : "FAIL", idx, name,
                detail.c_str(), dt);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::vector<double> default_grid() {
  std::vector<double> ts(20);
  bf_log_t_grid(20, 1e-3, 3.0, ts.data());
  return ts;
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "bf_acceptance";
  fs::create_directories(dir);
  return dir;
}

// 1. dictator softened by 1e-8 sits on the capacity line to 1e-6 for n = 1..6
bool dictator_equality(std::string& detail) {
  auto ts = default_grid();
  double worst = 0;
  bool api_ok = true;
  for (int n = 1; n <= 6; ++n) {
    bf_predicate* p = nullptr;
    api_ok = api_ok && bf_predicate_named("dictator", n, 1e-8, &p) == BF_OK;
    if (!api_ok) break;
    for (double t : ts) {
      double c = 0, cap_h = 0, g = 0, mi = 0;
      api_ok = api_ok && bf_crossover(t, &c) == BF_OK && bf_h2(c, &cap_h) == BF_OK &&
               bf_flow_gamma(p, t, &g) == BF_OK && bf_flow_mi(p, t, &mi) == BF_OK;
      if (!api_ok) break;
      worst = std::max(worst, std::fabs(g - cap_h));
      worst = std::max(worst, std::fabs(mi - (1.0 - cap_h)));
    }
    bf_predicate_free(p);
  }
  detail = "max capacity-line deviation " + fmt(worst) + " (tol 1e-6, budget 1 s)";
  if (!api_ok) detail = std::string("api error: ") + bf_last_error();
  return api_ok && worst <= 1e-6;
}

// 2. every function on 3 and 4 bits keeps the capacity margin above -1e-5
bool exhaustive_sweep(std::string& detail) {
  auto ts = default_grid();
  double worst = 1.0;
  bool api_ok = true;
  for (int n : {3, 4}) {
    bf_report* rep = nullptr;
    api_ok = api_ok &&
             bf_sweep_flow(n, 1e-6, 0, 0, ts.data(), 20, 1, &rep) == BF_OK;
    if (!api_ok) break;
    worst = std::min(worst, rep_num(rep, "results.min_margin"));
    bf_report_free(rep);
  }
  detail = "min margin over 2^8 + 2^16 functions = " + fmt(worst) +
           " (tol -1e-5, budget 30 s)";
  if (!api_ok) detail = std::string("api error: ") + bf_last_error();
  return api_ok && worst >= -1e-5;
}

// 3. stored dissipation counterexample stays negative and evaluates instantly
bool eta_counterexample(std::string& detail) {
  bf_candidate* c = nullptr;
  if (bf_candidate_open("eta-guess", &c) != BF_OK) {
    detail = std::string("api error: ") + bf_last_error();
    return false;
  }
  const double w[3] = {0.1, 0.45, 0.45};
  const double u[3] = {0.99, 0.9999, 0.0001};
  const double v[3] = {0.01, 0.9999, 0.0001};
  double margin = 0;
  auto t0 = clock_type::now();
  bf_status st = bf_psi_margin(c, 3, w, u, v, &margin);
  double dt = seconds_since(t0);
  bf_candidate_free(c);
  detail = "margin " + fmt(margin) + " in " + fmt(dt * 1e6) +
           " us (need < 0, budget 1 ms)";
  return st == BF_OK && margin < 0.0 && dt < 1e-3;
}

// 4. same for the stored Hellinger-family counterexample
bool hellinger_counterexample(std::string& detail) {
  bf_candidate* c = nullptr;
  if (bf_candidate_open("hellinger-natural", &c) != BF_OK) {
    detail = std::string("api error: ") + bf_last_error();
    return false;
  }
  const double w[3] = {0.9118, 0.0760, 0.0122};
  const double u[3] = {0.9996, 0.7316, 0.2996};
  const double v[3] = {0.9992, 0.1416, 0.5866};
  double margin = 0;
  auto t0 = clock_type::now();
  bf_status st = bf_psi_margin(c, 3, w, u, v, &margin);
  double dt = seconds_since(t0);
  bf_candidate_free(c);
  detail = "margin " + fmt(margin) + " in " + fmt(dt * 1e6) +
           " us (need < 0, budget 1 ms)";
  return st == BF_OK && margin < 0.0 && dt < 1e-3;
}

// 5. oracle vs closed form on the symmetric slice, plus minimizer structure
bool zeta_grid_agreement(std::string& detail) {
  bf_report* rep = nullptr;
  if (bf_zeta_grid(20, 4, 2026, 1, &rep) != BF_OK) {
    detail = std::string("api error: ") + bf_last_error();
    return false;
  }
  double diff = rep_num(rep, "results.max_abs_diff");
  double sdist = rep_num(rep, "results.max_structure_distance");
  int64_t infeasible = -1;
  bf_report_get_int(rep, "results.infeasible", &infeasible);
  bf_report_free(rep);
  detail = "max |closed - oracle| " + fmt(diff) + " (tol 1e-3), structure dist " +
           fmt(sdist) + " (tol 1e-2), budget 5 min";
  return infeasible == 0 && diff <= 1e-3 && sdist <= 1e-2;
}

// 6. the closed-form lower bound never exceeds the oracle on random queries
bool zeta_bound_dominance(std::string& detail) {
  bf::Rng g{660001};
  double worst_gap = 1.0;
  for (int i = 0; i < 100; ++i) {
    double mu = g.uniform(0.05, 0.95);
    double mw = g.uniform(0.05, 0.95);
    double hu = 0, hw = 0;
    bf_h2(mu, &hu);
    bf_h2(mw, &hw);
    double eu = g.uniform(0.1, 0.9) * hu;
    double ew = g.uniform(0.1, 0.9) * hw;
    double bound = 0;
    if (bf_zeta_lower_bound(mu, mw, eu, ew, &bound) != BF_OK) {
      detail = std::string("bound failed: ") + bf_last_error();
      return false;
    }
    bf_zeta_result* res = nullptr;
    if (bf_zeta_oracle(mu, mw, eu, ew, 3, 7000 + i, &res) != BF_OK) {
      detail = std::string("oracle failed: ") + bf_last_error();
      return false;
    }
    double value = 0;
    int feasible = 0;
    bf_zeta_result_value(res, &value);
    bf_zeta_result_feasible(res, &feasible);
    bf_zeta_result_free(res);
    if (!feasible) {
      detail = "oracle did not converge on query " + std::to_string(i);
      return false;
    }
    worst_gap = std::min(worst_gap, value - bound);
  }
  detail = "min (oracle - bound) over 100 queries = " + fmt(worst_gap) +
           " (tol -1e-6, budget 2 min)";
  return worst_gap >= -1e-6;
}

// 7. analytic flow derivatives match central differences with h = 1e-5
bool derivative_exactness(std::string& detail) {
  bf::Rng g{770007};
  const double h = 1e-5;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    int n = 1 + i % 4;
    std::vector<double> values(size_t{1} << n);
    for (double& x : values) x = g.uniform(0.05, 0.95);
    bf_predicate* p = nullptr;
    if (bf_predicate_from_values(n, values.data(), &p) != BF_OK) {
      detail = std::string("api error: ") + bf_last_error();
      return false;
    }
    for (double t : {0.08, 0.4, 1.2}) {
      double gp = 0, gm = 0, dg = 0;
      bf_flow_gamma(p, t + h, &gp);
      bf_flow_gamma(p, t - h, &gm);
      bf_flow_gamma_derivative(p, t, &dg);
      worst = std::max(worst, std::fabs(dg - (gp - gm) / (2 * h)));

      double rp = 0, rm = 0, dr = 0;
      int clipped = 0;
      bf_hellinger_r(p, t + h, &rp, &clipped);
      bf_hellinger_r(p, t - h, &rm, &clipped);
      if (bf_hellinger_r_derivative(p, t, &dr) != BF_OK) {
        bf_predicate_free(p);
        detail = std::string("api error: ") + bf_last_error();
        return false;
      }
      worst = std::max(worst, std::fabs(dr - (rp - rm) / (2 * h)));
    }
    bf_predicate_free(p);
  }
  detail = "max |analytic - central difference| " + fmt(worst) +
           " (tol 1e-6, budget 10 s)";
  return worst <= 1e-6;
}

// 8. two-point identity to 1e-12 and averaged bound above -1e-9
bool two_point_and_averaged(std::string& detail) {
  bf::Rng g{880008};
  double worst_id = 0;
  for (int i = 0; i < 10000; ++i) {
    double lhs = 0, rhs = 0;
    if (bf_two_point_sides(g.uniform(-0.99, 0.99), g.uniform(-0.99, 0.99), &lhs,
                           &rhs) != BF_OK) {
      detail = std::string("api error: ") + bf_last_error();
      return false;
    }
    worst_id = std::max(worst_id, std::fabs(lhs - rhs));
  }
  double worst_margin = 1.0;
  for (int i = 0; i < 10000; ++i) {
    int k = 1 + static_cast<int>(g.next() % 4);
    std::vector<double> w(k), u(k), x(k);
    double tot = 0;
    for (int a = 0; a < k; ++a) {
      w[a] = g.uniform(0.05, 1.0);
      tot += w[a];
    }
    for (int a = 0; a < k; ++a) {
      w[a] /= tot;
      u[a] = g.uniform(-0.99, 0.99);
      x[a] = g.uniform(-0.99, 0.99);
    }
    double margin = 0;
    if (bf_averaged_h_margin(k, w.data(), u.data(), x.data(), &margin) != BF_OK) {
      detail = std::string("api error: ") + bf_last_error();
      return false;
    }
    worst_margin = std::min(worst_margin, margin);
  }
  detail = "identity gap " + fmt(worst_id) + " (tol 1e-12), min averaged margin " +
           fmt(worst_margin) + " (tol -1e-9)";
  return worst_id <= 1e-12 && worst_margin >= -1e-9;
}

// 9. the five deterministic convexity/identity checks
bool appendix_suite(std::string& detail) {
  bf_report* rep = nullptr;
  if (bf_appendix("all", 0, 1, &rep) != BF_OK) {
    detail = std::string("api error: ") + bf_last_error();
    return false;
  }
  double min_margin = rep_num(rep, "results.min_margin");
  std::string cls = rep_cls(rep);
  char* last_name = nullptr;
  bool five = bf_report_get_string(rep, "results.checks.4.name", &last_name) == BF_OK;
  bf_string_free(last_name);
  bf_report_free(rep);
  detail = "5 checks, min margin " + fmt(min_margin) +
           " (tol -1e-10), classification " + cls + " (budget 30 s)";
  return five && min_margin >= -1e-10 && cls == "pass";
}

// one randomized scan: pass classification, margin floor, replay fidelity
bool scan_case(bf_report* rep, const fs::path& base, bf_candidate* cand,
               std::string& detail, const char* label) {
  if (!rep) {
    detail = std::string(label) + ": " + bf_last_error();
    return false;
  }
  double min_margin = rep_num(rep, "results.min_margin");
  std::string cls = rep_cls(rep);
  int wrote = 0;
  if (bf_report_write_replay(rep, base.string().c_str(), &wrote) != BF_OK ||
      wrote != 1) {
    detail = std::string(label) + ": replay file not written";
    bf_report_free(rep);
    return false;
  }
  char* payload = nullptr;
  char* ext = nullptr;
  bf_report_replay(rep, &payload, &ext);
  std::string path = base.string() + (ext ? ext : "");
  bf_string_free(payload);
  bf_string_free(ext);

  bf_report* redo = nullptr;
  if (bf_replay(path.c_str(), cand, 1e-9, &redo) != BF_OK) {
    detail = std::string(label) + ": replay failed: " + bf_last_error();
    bf_report_free(rep);
    return false;
  }
  double orig = rep_num(rep, "results.argmin.margin");
  double again = rep_num(redo, "results.margin");
  bf_report_free(redo);
  bf_report_free(rep);
  double drift = std::fabs(again - orig);
  if (!(cls == "pass") || !(min_margin >= -1e-9) || !(drift <= 1e-12)) {
    detail = std::string(label) + ": margin " + fmt(min_margin) + ", class " + cls +
             ", replay drift " + fmt(drift);
    return false;
  }
  return true;
}

// 10. the evidence scans for the open inequalities, with replay files
bool evidence_scans(std::string& detail) {
  fs::path dir = scratch_dir();
  bf_scan_config cfg;
  bf_scan_config_default(&cfg);
  cfg.samples = 100000;
  cfg.jobs = 1;

  bf_candidate* phi = nullptr;
  bf_candidate_open("phi", &phi);
  cfg.seed = 101;
  bf_report* rep = nullptr;
  if (bf_scan_membership(phi, &cfg, "scan-c3", &rep) != BF_OK) rep = nullptr;
  if (!scan_case(rep, dir / "c3_argmin", phi, detail, "scan-c3")) {
    bf_candidate_free(phi);
    return false;
  }
  bf_candidate_free(phi);

  cfg.seed = 102;
  rep = nullptr;
  if (bf_scan_c4(&cfg, &rep) != BF_OK) rep = nullptr;
  if (!scan_case(rep, dir / "c4_argmin", nullptr, detail, "scan-c4")) return false;

  cfg.seed = 103;
  rep = nullptr;
  if (bf_scan_c5(&cfg, &rep) != BF_OK) rep = nullptr;
  if (!scan_case(rep, dir / "c5_argmin", nullptr, detail, "scan-c5")) return false;

  // balanced derivative-bound sweep on 4 bits; its replay file is a predicate
  auto ts = default_grid();
  rep = nullptr;
  if (bf_sweep_flow(4, 1e-6, 1, 1, ts.data(), 20, 1, &rep) != BF_OK) {
    detail = std::string("sweep: ") + bf_last_error();
    return false;
  }
  double sweep_min = rep_num(rep, "results.min_margin");
  std::string cls = rep_cls(rep);
  fs::path base = dir / "sweep_argmin";
  int wrote = 0;
  bf_report_write_replay(rep, base.string().c_str(), &wrote);
  double worst_t = rep_num(rep, "results.argmin.t");
  double orig = rep_num(rep, "results.argmin.margin");
  bf_report_free(rep);
  if (wrote != 1) {
    detail = "sweep: replay file not written";
    return false;
  }
  bf_predicate* p = nullptr;
  if (bf_predicate_read((base.string() + ".txt").c_str(), 0.0, &p) != BF_OK) {
    detail = std::string("sweep replay read: ") + bf_last_error();
    return false;
  }
  double again = 0;
  bf_flow_derivative_margin(p, worst_t, &again);
  bf_predicate_free(p);
  double drift = std::fabs(again - orig);
  if (!(cls == "pass") || !(sweep_min >= -1e-9) || !(drift <= 1e-12)) {
    detail = "sweep: margin " + fmt(sweep_min) + ", class " + cls +
             ", replay drift " + fmt(drift);
    return false;
  }
  detail = "c3/c4/c5 at 1e5 samples + balanced 4-bit sweep all pass "
           "(tol -1e-9), replays reproduce margins to 1e-12 (budget 10 min)";
  return true;
}

// 11. quadrature marching against the balanced-mean closed form
bool ode_closed_form(std::string& detail) {
  double worst = 0;
  for (double g0 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double x0 = 0;
    bf_h2_inv(g0, &x0);
    for (double t : {0.05, 0.2, 0.5, 1.0, 2.0}) {
      double want = 0, got = 0;
      bf_h2(0.5 * (1.0 - std::exp(-2.0 * t) * (1.0 - 2.0 * x0)), &want);
      if (bf_ode_lower_bound(0.5, g0, t, &got, nullptr) != BF_OK) {
        detail = std::string("api error: ") + bf_last_error();
        return false;
      }
      worst = std::max(worst, std::fabs(got - want));
    }
  }
  detail = "max |marched - closed form| " + fmt(worst) +
           " on 5x5 grid (tol 1e-8, budget 5 s)";
  return worst <= 1e-8;
}

// 12. thread count never changes report bytes
bool determinism(std::string& detail) {
  auto bytes_differ = [](bf_report* a, bf_report* b) {
    std::string sa = rep_json(a), sb = rep_json(b);
    bf_report_free(a);
    bf_report_free(b);
    return sa.empty() || sa != sb;
  };

  bf_scan_config cfg;
  bf_scan_config_default(&cfg);
  cfg.samples = 20000;

  bf_candidate* phi = nullptr;
  bf_candidate_open("phi", &phi);
  for (uint64_t seed : {uint64_t{31}}) {
    cfg.seed = seed;
    bf_report* one = nullptr;
    bf_report* four = nullptr;
    cfg.jobs = 1;
    bf_scan_membership(phi, &cfg, "scan-c3", &one);
    cfg.jobs = 4;
    bf_scan_membership(phi, &cfg, "scan-c3", &four);
    if (bytes_differ(one, four)) {
      detail = "scan-c3 bytes differ between --jobs 1 and 4";
      bf_candidate_free(phi);
      return false;
    }
  }
  bf_candidate_free(phi);

  cfg.seed = 32;
  bf_report* one = nullptr;
  bf_report* four = nullptr;
  cfg.jobs = 1;
  bf_scan_c4(&cfg, &one);
  cfg.jobs = 4;
  bf_scan_c4(&cfg, &four);
  if (bytes_differ(one, four)) {
    detail = "scan-c4 bytes differ between --jobs 1 and 4";
    return false;
  }

  cfg.seed = 33;
  one = four = nullptr;
  cfg.jobs = 1;
  bf_scan_c5(&cfg, &one);
  cfg.jobs = 4;
  bf_scan_c5(&cfg, &four);
  if (bytes_differ(one, four)) {
    detail = "scan-c5 bytes differ between --jobs 1 and 4";
    return false;
  }

  auto ts = default_grid();
  one = four = nullptr;
  bf_sweep_flow(3, 1e-6, 0, 0, ts.data(), 20, 1, &one);
  bf_sweep_flow(3, 1e-6, 0, 0, ts.data(), 20, 4, &four);
  if (bytes_differ(one, four)) {
    detail = "mi-sweep bytes differ between --jobs 1 and 4";
    return false;
  }

  one = four = nullptr;
  bf_appendix("all", 5, 1, &one);
  bf_appendix("all", 5, 4, &four);
  if (bytes_differ(one, four)) {
    detail = "appendix bytes differ between --jobs 1 and 4";
    return false;
  }

  detail = "c3/c4/c5/sweep/appendix reports byte-identical for --jobs 1 vs 4";
  return true;
}

} // namespace

int main() {
  Gate gate;
  gate.run(1, "dictator capacity equality", dictator_equality);
  gate.run(2, "exhaustive 3/4-bit sweep", exhaustive_sweep);
  gate.run(3, "dissipation counterexample", eta_counterexample);
  gate.run(4, "hellinger counterexample", hellinger_counterexample);
  gate.run(5, "coupling grid agreement", zeta_grid_agreement);
  gate.run(6, "coupling bound dominance", zeta_bound_dominance);
  gate.run(7, "derivative exactness", derivative_exactness);
  gate.run(8, "two-point identity/average", two_point_and_averaged);
  gate.run(9, "convexity check suite", appendix_suite);
  gate.run(10, "evidence scans + replay", evidence_scans);
  gate.run(11, "ode bound closed form", ode_closed_form);
  gate.run(12, "determinism across jobs", determinism);
  if (gate.failures == 0)
    std::printf("acceptance: all 12 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", gate.failures);
  return gate.failures;
}
