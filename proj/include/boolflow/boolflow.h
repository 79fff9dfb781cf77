#ifndef BOOLFLOW_H
#define BOOLFLOW_H

/*
 * C API for the boolflow library: information-dissipation bounds for
 * Boolean-valued predicates under white-noise drift on the hypercube,
 * the phi/kappa/zeta scalar kernels behind them, a coupling oracle, and
 * randomized counterexample scans with deterministic reports.
 *
 * Conventions:
 *  - Every fallible call returns bf_status; outputs go through pointers.
 *  - On any non-BF_OK return, bf_last_error() describes the failure for
 *    the calling thread.
 *  - Opaque handles are freed with their matching bf_*_free; strings
 *    returned through char** are freed with bf_string_free.
 *  - All entropies are base 2. crossover(t) = (1 - exp(-2t))/2.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bf_status {
  BF_OK = 0,
  BF_ERR_INVALID_ARGUMENT = 1,
  BF_ERR_DOMAIN = 2,
  BF_ERR_INFEASIBLE = 3,
  BF_ERR_IO = 4,
  BF_ERR_INTERNAL = 5
} bf_status;

/* Thread-local message for the most recent failure. Never NULL. */
const char* bf_last_error(void);

const char* bf_version(void);

void bf_string_free(char* s);

/* ---- scalar kernels ---------------------------------------------------- */

bf_status bf_h2(double p, double* out);
bf_status bf_h2_inv(double y, double* out);
bf_status bf_j(double p, double* out);
bf_status bf_d2(double x, double y, double* out);
bf_status bf_eta(double x, double* out);
bf_status bf_big_l(double u, double* out);
bf_status bf_big_l_inv(double y, double* out);
bf_status bf_binary_conv(double a, double b, double* out);
bf_status bf_crossover(double t, double* out);
bf_status bf_solve_r(double x, double y, double* out);
bf_status bf_phi(double x, double y, double* out);
bf_status bf_zeta_symmetric(double m, double e, double* out);
bf_status bf_kappa(double u, double w, double* out);
bf_status bf_zeta_lower_bound(double mu, double mw, double eu, double ew,
                              double* out);
bf_status bf_conjecture5_margin(double mu, double mw, double eu, double ew,
                                double* out);
bf_status bf_c4_reflection_margin(double u, double w, double* out);
bf_status bf_c4_midpoint_margin(double a1, double b1, double a2, double b2,
                                double* out);

/* Comparison ODE gamma' = phi(mean, gamma) integrated to time t.
 * saturated (may be NULL) is set to 1 when the result is the entropy cap
 * h2(mean) to double precision. */
bf_status bf_ode_lower_bound(double mean, double gamma0, double t, double* value,
                             int* saturated);

/* Log-spaced grid of `points` values in [t_min, t_max] into out_ts. */
bf_status bf_log_t_grid(int points, double t_min, double t_max, double* out_ts);

/* ---- psi candidates and averaged constraints ---------------------------- */

typedef struct bf_candidate bf_candidate;

/* name: built-in ("phi", "eta-guess", "zero", "hellinger-natural",
 * "hellinger-zero") or a path to a grid candidate file. */
bf_status bf_candidate_open(const char* name, bf_candidate** out);
void bf_candidate_free(bf_candidate* c);

/* family: 0 = entropy, 1 = hellinger. */
bf_status bf_candidate_family(const bf_candidate* c, int* family);
bf_status bf_candidate_eval(const bf_candidate* c, double a, double b, double* out);

/* Averaged-constraint margin of a k-atom instance against the candidate;
 * dispatches on the candidate's family. Negative means violated. */
bf_status bf_psi_margin(const bf_candidate* c, int k, const double* weights,
                        const double* u, const double* w, double* out);

/* Both sides of the two-point Hellinger dissipation identity. */
bf_status bf_two_point_sides(double u, double w, double* lhs, double* rhs);

bf_status bf_psi_hat_h_value(double a1, double b1, double a2, double b2,
                             double* out);

/* Mixture dissipation minus the quadratic surrogate at mixture moments. */
bf_status bf_averaged_h_margin(int k, const double* weights, const double* u,
                               const double* w, double* out);

/* ---- predicates ---------------------------------------------------------- */

typedef struct bf_predicate bf_predicate;

/* name: dictator | majority | parity | constant. eps in [0, 0.5] softens
 * hard signs: P(F=-1) = eps for +1, 1-eps for -1. */
bf_status bf_predicate_named(const char* name, int n, double eps,
                             bf_predicate** out);
bf_status bf_predicate_from_mask(int n, uint64_t mask, double eps,
                                 bf_predicate** out);
bf_status bf_predicate_read(const char* path, double eps, bf_predicate** out);
bf_status bf_predicate_from_values(int n, const double* values,
                                   bf_predicate** out);
bf_status bf_predicate_soften(const bf_predicate* p, double eps,
                              bf_predicate** out);
void bf_predicate_free(bf_predicate* p);

bf_status bf_predicate_n(const bf_predicate* p, int* n);
/* value at vertex index (bit i-1 of the index set means x_i = -1). */
bf_status bf_predicate_value(const bf_predicate* p, uint64_t index, double* out);

/* ---- flow ----------------------------------------------------------------- */

bf_status bf_flow_mean(const bf_predicate* p, double* out);
bf_status bf_flow_gamma(const bf_predicate* p, double t, double* out);
bf_status bf_flow_gamma_derivative(const bf_predicate* p, double t, double* out);
bf_status bf_flow_mi(const bf_predicate* p, double t, double* out);
/* capacity gap (1 - h2(p_t)) - I(F; Y_t) */
bf_status bf_flow_c1_margin(const bf_predicate* p, double t, double* out);
/* derivative gap dgamma/dt - phi(mean, gamma) */
bf_status bf_flow_derivative_margin(const bf_predicate* p, double t, double* out);

bf_status bf_hellinger_ef(const bf_predicate* p, double* out);
/* clipped (may be NULL): vertices whose conditional mean was pulled onto
 * the +-(1 - 1e-12) clip boundary. */
bf_status bf_hellinger_r(const bf_predicate* p, double t, double* out,
                         int* clipped);
/* fails with BF_ERR_DOMAIN when the field is clipped */
bf_status bf_hellinger_r_derivative(const bf_predicate* p, double t, double* out);
bf_status bf_hellinger_c2_margin(const bf_predicate* p, double t, double* out,
                                 int* clipped);

/* ---- coupling oracle ------------------------------------------------------- */

typedef struct bf_zeta_result bf_zeta_result;

bf_status bf_zeta_oracle(double mu, double mw, double eu, double ew, int restarts,
                         uint64_t seed, bf_zeta_result** out);
void bf_zeta_result_free(bf_zeta_result* r);
bf_status bf_zeta_result_value(const bf_zeta_result* r, double* out);
bf_status bf_zeta_result_residual(const bf_zeta_result* r, double* out);
bf_status bf_zeta_result_feasible(const bf_zeta_result* r, int* out);
bf_status bf_zeta_result_atom_count(const bf_zeta_result* r, int* out);
bf_status bf_zeta_result_atom(const bf_zeta_result* r, int i, double* weight,
                              double* u, double* w);

/* ---- reports ---------------------------------------------------------------- */

typedef struct bf_report bf_report;

void bf_report_free(bf_report* r);

/* as_csv = 0 renders deterministic JSON, 1 renders CSV (the trace table
 * when present, flattened key,value rows otherwise). */
bf_status bf_report_serialize(const bf_report* r, int as_csv, char** out);
/* Atomic write (path.tmp + rename). */
bf_status bf_report_write(const bf_report* r, const char* path, int as_csv);

bf_status bf_report_classification(const bf_report* r, char** out);
bf_status bf_report_min_margin(const bf_report* r, double* out);
/* 0 for pass/noise, 2 candidate-violation, 3 theorem-violation. */
bf_status bf_report_exit_code(const bf_report* r, int* out);

/* Dotted-path field access, e.g. "results.min_margin". */
bf_status bf_report_get_number(const bf_report* r, const char* path, double* out);
bf_status bf_report_get_int(const bf_report* r, const char* path, int64_t* out);
bf_status bf_report_get_string(const bf_report* r, const char* path, char** out);

/* Argmin replay payload; *payload is "" when the report carries none.
 * *extension is the suffix the payload should be written with. */
bf_status bf_report_replay(const bf_report* r, char** payload, char** extension);
/* Writes base_path + extension when a payload exists; *wrote says whether
 * a file was produced. */
bf_status bf_report_write_replay(const bf_report* r, const char* base_path,
                                 int* wrote);

/* ---- scans -------------------------------------------------------------------- */

typedef struct bf_scan_config {
  uint64_t seed;
  int64_t samples;
  int jobs;            /* worker threads; does not affect report bytes */
  double tol;          /* violation tolerance for classification */
  int refine;          /* 1: polish the worst samples with Nelder-Mead */
  int refine_top_k;
  int refine_iters;
} bf_scan_config;

void bf_scan_config_default(bf_scan_config* cfg);

/* check_id: "scan-c3" (entropy phi scan with oracle escalation) or
 * "verify-psi" (any candidate). */
bf_status bf_scan_membership(const bf_candidate* c, const bf_scan_config* cfg,
                             const char* check_id, bf_report** out);
bf_status bf_scan_c4(const bf_scan_config* cfg, bf_report** out);
bf_status bf_scan_c5(const bf_scan_config* cfg, bf_report** out);

/* margin_kind: 0 = capacity gap (conjectured), 1 = derivative bound
 * (theorem). Sweeps every n-bit predicate mask, n <= 4. */
bf_status bf_sweep_flow(int n, double eps, int balanced_only, int margin_kind,
                        const double* ts, int t_count, int jobs, bf_report** out);

bf_status bf_flow_trace(const bf_predicate* p, const double* ts, int t_count,
                        const char* source, double eps, bf_report** out);
bf_status bf_hellinger_trace(const bf_predicate* p, const double* ts, int t_count,
                             const char* source, double eps, bf_report** out);

/* which: "all" or comma-separated subset of jlinv-convex, ratio-decreasing,
 * perspective-convex, fb-nonneg, z-identity. */
bf_status bf_appendix(const char* which, uint64_t seed, int jobs, bf_report** out);

bf_status bf_zeta_grid(int grid, int restarts, uint64_t seed, int jobs,
                       bf_report** out);
bf_status bf_zeta_query(double mu, double mw, double eu, double ew, int restarts,
                        uint64_t seed, bf_report** out);

/* Re-evaluates an argmin replay file. cand may be NULL for c4/c5 payloads. */
bf_status bf_replay(const char* path, const bf_candidate* cand, double tol,
                    bf_report** out);

#ifdef __cplusplus
}
#endif

#endif /* BOOLFLOW_H */
