// Command line front end. Talks to the core strictly through the C API.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boolflow/boolflow.h"

namespace {

struct OutputOpts {
  std::string path;
  std::string format = "json";
};

struct ScanOpts {
  bf_scan_config cfg{};
  ScanOpts() { bf_scan_config_default(&cfg); }
};

struct GridOpts {
  int points = 20;
  double t_min = 1e-3;
  double t_max = 3.0;
};

int fail_api(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, bf_last_error());
  return 1;
}

void add_output_flags(CLI::App* cmd, OutputOpts& out) {
  cmd->add_option("--out", out.path, "write the report to this file instead of stdout");
  cmd->add_option("--format", out.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_grid_flags(CLI::App* cmd, GridOpts& g) {
  cmd->add_option("--t-points", g.points, "number of grid times")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--t-min", g.t_min, "smallest time")->check(CLI::PositiveNumber);
  cmd->add_option("--t-max", g.t_max, "largest time")->check(CLI::PositiveNumber);
}

void add_scan_flags(CLI::App* cmd, ScanOpts& s) {
  cmd->add_option("--seed", s.cfg.seed, "base seed");
  cmd->add_option("--samples", s.cfg.samples, "number of sampled instances")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--jobs", s.cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", s.cfg.tol, "violation tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--refine,!--no-refine", s.cfg.refine,
                "polish the worst samples with a local search");
  cmd->add_option("--refine-top-k", s.cfg.refine_top_k,
                  "how many of the worst samples to polish")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--refine-iters", s.cfg.refine_iters,
                  "local search iterations per polished sample")
      ->check(CLI::NonNegativeNumber);
}

std::string replay_base(const std::string& out_path) {
  std::string base = out_path;
  size_t dot = base.find_last_of('.');
  size_t slash = base.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    base.erase(dot);
  return base + ".argmin";
}

// Serializes the report, emits it, drops the argmin replay file next to --out,
// and converts the report classification into the process exit code.
int finish(bf_report* rep, const OutputOpts& out) {
  int as_csv = out.format == "csv" ? 1 : 0;
  int rc = 0;
  if (out.path.empty()) {
    char* text = nullptr;
    if (bf_report_serialize(rep, as_csv, &text) != BF_OK) {
      bf_report_free(rep);
      return fail_api("serialize report");
    }
    std::fputs(text, stdout);
    bf_string_free(text);
  } else {
    if (bf_report_write(rep, out.path.c_str(), as_csv) != BF_OK) {
      bf_report_free(rep);
      return fail_api("write report");
    }
    int wrote = 0;
    if (bf_report_write_replay(rep, replay_base(out.path).c_str(), &wrote) != BF_OK) {
      bf_report_free(rep);
      return fail_api("write replay file");
    }
  }
  if (bf_report_exit_code(rep, &rc) != BF_OK) rc = 0;
  bf_report_free(rep);
  return rc;
}

std::vector<double> make_grid(const GridOpts& g, bool* ok) {
  std::vector<double> ts(static_cast<size_t>(g.points));
  *ok = bf_log_t_grid(g.points, g.t_min, g.t_max, ts.data()) == BF_OK;
  return ts;
}

int open_predicate(const std::string& function, const std::string& file, int n,
                   bool has_mask, uint64_t mask, double eps, bf_predicate** p,
                   std::string* source) {
  bf_status st;
  if (!file.empty()) {
    st = bf_predicate_read(file.c_str(), eps, p);
    *source = file;
  } else if (has_mask) {
    st = bf_predicate_from_mask(n, mask, eps, p);
    *source = "mask:" + std::to_string(mask);
  } else {
    st = bf_predicate_named(function.c_str(), n, eps, p);
    *source = function;
  }
  return st == BF_OK ? 0 : fail_api("build predicate");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagnostics for noisy boolean functions"};
  app.require_subcommand(1);

  // flow / hellinger share the predicate and grid flags.
  struct TraceOpts {
    std::string function = "dictator";
    std::string file;
    int n = 3;
    uint64_t mask = 0;
    bool has_mask = false;
    double eps = 1e-6;
    GridOpts grid;
    OutputOpts out;
  };
  auto add_trace_flags = [](CLI::App* cmd, TraceOpts& t) {
    cmd->add_option("--function", t.function,
                    "named predicate: dictator, majority, parity, constant");
    cmd->add_option("--n", t.n, "number of coordinates")->check(CLI::PositiveNumber);
    cmd->add_option("--mask", t.mask, "truth table bits, vertex 0 first")
        ->each([&t](const std::string&) { t.has_mask = true; });
    cmd->add_option("--predicate-file", t.file, "read the predicate from a file");
    cmd->add_option("--epsilon", t.eps, "flip probability applied to hard signs");
    add_grid_flags(cmd, t.grid);
    add_output_flags(cmd, t.out);
  };

  TraceOpts flow_opts;
  CLI::App* flow_cmd = app.add_subcommand(
      "flow", "posterior entropy and mutual information along the noise flow");
  add_trace_flags(flow_cmd, flow_opts);

  TraceOpts hell_opts;
  CLI::App* hell_cmd = app.add_subcommand(
      "hellinger", "Hellinger correlation along the noise flow");
  add_trace_flags(hell_cmd, hell_opts);

  struct SweepOpts {
    int n = 3;
    double eps = 1e-6;
    bool balanced_only = false;
    std::string margin = "capacity";
    int jobs = 1;
    GridOpts grid;
    OutputOpts out;
  } sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand(
      "mi-sweep", "exhaustive sweep over all predicates on n coordinates");
  sweep_cmd->add_option("--n", sweep_opts.n, "number of coordinates (at most 4)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--epsilon", sweep_opts.eps, "flip probability for hard signs");
  sweep_cmd->add_flag("--balanced-only", sweep_opts.balanced_only,
                      "keep only predicates with equally many -1 and +1 vertices");
  sweep_cmd->add_option("--margin", sweep_opts.margin, "which margin to minimize")
      ->check(CLI::IsMember({"capacity", "derivative"}));
  sweep_cmd->add_option("--jobs", sweep_opts.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  add_grid_flags(sweep_cmd, sweep_opts.grid);
  add_output_flags(sweep_cmd, sweep_opts.out);

  struct ZetaOpts {
    int grid = 0;
    double mu = -1, mw = -1, eu = -1, ew = -1;
    int restarts = 8;
    uint64_t seed = 0;
    int jobs = 1;
    OutputOpts out;
  } zeta_opts;
  CLI::App* zeta_cmd = app.add_subcommand(
      "zeta", "minimum-cost couplings: single query or symmetric grid check");
  zeta_cmd->add_option("--grid", zeta_opts.grid,
                       "compare the closed form on a grid of this size");
  zeta_cmd->add_option("--mu", zeta_opts.mu, "mean of the u marginal");
  zeta_cmd->add_option("--mw", zeta_opts.mw, "mean of the w marginal");
  zeta_cmd->add_option("--eu", zeta_opts.eu, "entropy of the u marginal");
  zeta_cmd->add_option("--ew", zeta_opts.ew, "entropy of the w marginal");
  zeta_cmd->add_option("--restarts", zeta_opts.restarts, "optimizer restarts")
      ->check(CLI::PositiveNumber);
  zeta_cmd->add_option("--seed", zeta_opts.seed, "base seed");
  zeta_cmd->add_option("--jobs", zeta_opts.jobs, "worker threads (grid mode)")
      ->check(CLI::PositiveNumber);
  add_output_flags(zeta_cmd, zeta_opts.out);

  struct PsiOpts {
    std::string candidate;
    ScanOpts scan;
    OutputOpts out;
  };
  PsiOpts verify_opts;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify-psi", "sample mixture instances against a candidate surface");
  verify_cmd
      ->add_option("--candidate", verify_opts.candidate,
                   "builtin name (phi, eta-guess, zero, hellinger-natural, "
                   "hellinger-zero) or a grid file path")
      ->required();
  add_scan_flags(verify_cmd, verify_opts.scan);
  add_output_flags(verify_cmd, verify_opts.out);

  PsiOpts c3_opts;
  c3_opts.candidate = "phi";
  CLI::App* c3_cmd = app.add_subcommand(
      "scan-c3", "random search for dissipation counterexamples, with escalation");
  c3_cmd->add_option("--candidate", c3_opts.candidate,
                     "candidate surface (defaults to phi)");
  add_scan_flags(c3_cmd, c3_opts.scan);
  add_output_flags(c3_cmd, c3_opts.out);

  struct PlainScanOpts {
    ScanOpts scan;
    OutputOpts out;
  };
  PlainScanOpts c4_opts;
  CLI::App* c4_cmd = app.add_subcommand(
      "scan-c4", "random search against the reflection and midpoint inequalities");
  add_scan_flags(c4_cmd, c4_opts.scan);
  add_output_flags(c4_cmd, c4_opts.out);

  PlainScanOpts c5_opts;
  CLI::App* c5_cmd = app.add_subcommand(
      "scan-c5", "random search against the symmetric slice inequality");
  add_scan_flags(c5_cmd, c5_opts.scan);
  add_output_flags(c5_cmd, c5_opts.out);

  struct AppendixOpts {
    std::string checks = "all";
    uint64_t seed = 0;
    int jobs = 1;
    OutputOpts out;
  } app_opts;
  CLI::App* app_cmd =
      app.add_subcommand("appendix", "deterministic convexity and identity checks");
  app_cmd->add_option("--checks", app_opts.checks,
                      "comma separated check names, or 'all'");
  app_cmd->add_option("--seed", app_opts.seed, "base seed");
  app_cmd->add_option("--jobs", app_opts.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  add_output_flags(app_cmd, app_opts.out);

  struct ReplayOpts {
    std::string file;
    std::string candidate;
    double tol = 1e-9;
    OutputOpts out;
  } replay_opts;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "re-evaluate a recorded worst case file");
  replay_cmd->add_option("file", replay_opts.file, "replay file path")->required();
  replay_cmd->add_option("--candidate", replay_opts.candidate,
                         "candidate surface for mixture instance files");
  replay_cmd->add_option("--tol", replay_opts.tol, "violation tolerance")
      ->check(CLI::PositiveNumber);
  add_output_flags(replay_cmd, replay_opts.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // collapse CLI11's parse-error exit codes onto the documented 0/1 split
    return app.exit(e) == 0 ? 0 : 1;
  }

  auto t0 = std::chrono::steady_clock::now();
  int rc = 1;

  if (flow_cmd->parsed() || hell_cmd->parsed()) {
    TraceOpts& t = flow_cmd->parsed() ? flow_opts : hell_opts;
    bf_predicate* p = nullptr;
    std::string source;
    rc = open_predicate(t.function, t.file, t.n, t.has_mask, t.mask, t.eps, &p,
                        &source);
    if (rc == 0) {
      bool ok = false;
      std::vector<double> ts = make_grid(t.grid, &ok);
      if (!ok) {
        rc = fail_api("build time grid");
      } else {
        bf_report* rep = nullptr;
        bf_status st =
            flow_cmd->parsed()
                ? bf_flow_trace(p, ts.data(), t.grid.points, source.c_str(), t.eps,
                                &rep)
                : bf_hellinger_trace(p, ts.data(), t.grid.points, source.c_str(),
                                     t.eps, &rep);
        rc = st == BF_OK ? finish(rep, t.out) : fail_api("trace");
      }
      bf_predicate_free(p);
    }
  } else if (sweep_cmd->parsed()) {
    bool ok = false;
    std::vector<double> ts = make_grid(sweep_opts.grid, &ok);
    if (!ok) {
      rc = fail_api("build time grid");
    } else {
      int kind = sweep_opts.margin == "derivative" ? 1 : 0;
      bf_report* rep = nullptr;
      bf_status st =
          bf_sweep_flow(sweep_opts.n, sweep_opts.eps, sweep_opts.balanced_only ? 1 : 0,
                        kind, ts.data(), sweep_opts.grid.points, sweep_opts.jobs, &rep);
      rc = st == BF_OK ? finish(rep, sweep_opts.out) : fail_api("mi-sweep");
    }
  } else if (zeta_cmd->parsed()) {
    bf_report* rep = nullptr;
    bf_status st;
    if (zeta_opts.grid > 0) {
      st = bf_zeta_grid(zeta_opts.grid, zeta_opts.restarts, zeta_opts.seed,
                        zeta_opts.jobs, &rep);
    } else if (zeta_opts.mu >= 0 && zeta_opts.mw >= 0 && zeta_opts.eu >= 0 &&
               zeta_opts.ew >= 0) {
      st = bf_zeta_query(zeta_opts.mu, zeta_opts.mw, zeta_opts.eu, zeta_opts.ew,
                         zeta_opts.restarts, zeta_opts.seed, &rep);
    } else {
      std::fprintf(stderr,
                   "error: zeta needs either --grid N or all of --mu --mw --eu --ew\n");
      return 1;
    }
    rc = st == BF_OK ? finish(rep, zeta_opts.out) : fail_api("zeta");
  } else if (verify_cmd->parsed() || c3_cmd->parsed()) {
    PsiOpts& o = verify_cmd->parsed() ? verify_opts : c3_opts;
    const char* check_id = verify_cmd->parsed() ? "verify-psi" : "scan-c3";
    bf_candidate* cand = nullptr;
    if (bf_candidate_open(o.candidate.c_str(), &cand) != BF_OK) {
      rc = fail_api("open candidate");
    } else {
      bf_report* rep = nullptr;
      bf_status st = bf_scan_membership(cand, &o.scan.cfg, check_id, &rep);
      rc = st == BF_OK ? finish(rep, o.out) : fail_api(check_id);
      bf_candidate_free(cand);
    }
  } else if (c4_cmd->parsed() || c5_cmd->parsed()) {
    PlainScanOpts& o = c4_cmd->parsed() ? c4_opts : c5_opts;
    bf_report* rep = nullptr;
    bf_status st = c4_cmd->parsed() ? bf_scan_c4(&o.scan.cfg, &rep)
                                    : bf_scan_c5(&o.scan.cfg, &rep);
    rc = st == BF_OK ? finish(rep, o.out) : fail_api("scan");
  } else if (app_cmd->parsed()) {
    bf_report* rep = nullptr;
    bf_status st =
        bf_appendix(app_opts.checks.c_str(), app_opts.seed, app_opts.jobs, &rep);
    rc = st == BF_OK ? finish(rep, app_opts.out) : fail_api("appendix");
  } else if (replay_cmd->parsed()) {
    bf_candidate* cand = nullptr;
    if (!replay_opts.candidate.empty() &&
        bf_candidate_open(replay_opts.candidate.c_str(), &cand) != BF_OK) {
      rc = fail_api("open candidate");
    } else {
      bf_report* rep = nullptr;
      bf_status st = bf_replay(replay_opts.file.c_str(), cand, replay_opts.tol, &rep);
      rc = st == BF_OK ? finish(rep, replay_opts.out) : fail_api("replay");
      bf_candidate_free(cand);
    }
  }

  std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  std::fprintf(stderr, "wall time: %.3f s\n", dt.count());
  return rc;
}
