#include "boolflow/boolflow.h"

#include <cstring>
#include <string>

#include "candidates.hpp"
#include "classify.hpp"
#include "errors.hpp"
#include "hellinger.hpp"
#include "hypercube_flow.hpp"
#include "margins.hpp"
#include "ode_bound.hpp"
#include "report.hpp"
#include "scalar_kernels.hpp"
#include "scans.hpp"
#include "zeta_oracle.hpp"

struct bf_candidate {
  bf::psi::Candidate impl;
};

struct bf_predicate {
  bf::flow::Predicate impl;
};

struct bf_zeta_result {
  bf::zeta::OracleResult impl;
};

struct bf_report {
  bf::report::Json impl;
};

namespace {

thread_local std::string g_last_error = "ok";

bf_status fail(bf_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs the body, translating exceptions into status codes.
template <class F>
bf_status guarded(F&& body) {
  try {
    body();
    return BF_OK;
  } catch (const bf::infeasible_error& e) {
    return fail(BF_ERR_INFEASIBLE, e.what());
  } catch (const bf::domain_error& e) {
    return fail(BF_ERR_DOMAIN, e.what());
  } catch (const bf::io_error& e) {
    return fail(BF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BF_ERR_INTERNAL, e.what());
  }
}

bf_status need(bool ok, const char* what) {
  if (ok) return BF_OK;
  return fail(BF_ERR_INVALID_ARGUMENT, std::string("null or invalid argument: ") + what);
}

const bf::report::Json* walk(const bf::report::Json& root, const char* path) {
  const bf::report::Json* cur = &root;
  std::string key;
  const char* p = path;
  while (true) {
    const char* dot = std::strchr(p, '.');
    key = dot ? std::string(p, dot) : std::string(p);
    if (cur->is_object() && cur->contains(key)) {
      cur = &(*cur)[key];
    } else if (cur->is_array()) {
      try {
        size_t idx = std::stoul(key);
        if (idx >= cur->size()) return nullptr;
        cur = &(*cur)[idx];
      } catch (const std::exception&) {
        return nullptr;
      }
    } else {
      return nullptr;
    }
    if (!dot) return cur;
    p = dot + 1;
  }
}

bf::scan::Config to_config(const bf_scan_config* cfg) {
  bf::scan::Config c;
  c.seed = cfg->seed;
  c.samples = cfg->samples;
  c.jobs = cfg->jobs;
  c.tol = cfg->tol;
  c.refine = cfg->refine != 0;
  c.refine_top_k = cfg->refine_top_k;
  c.refine_iters = cfg->refine_iters;
  if (c.samples < 0) throw bf::domain_error("samples must be nonnegative");
  if (c.jobs < 1) throw bf::domain_error("jobs must be at least 1");
  if (!(c.tol > 0)) throw bf::domain_error("tol must be positive");
  if (c.refine_top_k < 1 || c.refine_iters < 0)
    throw bf::domain_error("refine_top_k >= 1 and refine_iters >= 0 required");
  return c;
}

bf_status out_report(bf::report::Json rep, bf_report** out) {
  *out = new bf_report{std::move(rep)};
  return BF_OK;
}

} // namespace

extern "C" {

const char* bf_last_error(void) { return g_last_error.c_str(); }

const char* bf_version(void) { return "0.1.0"; }

void bf_string_free(char* s) { std::free(s); }

/* ---- scalar kernels ---- */

#define BF_SCALAR1(name, expr)                                    \
  bf_status name(double x, double* out) {                         \
    bf_status st = need(out != nullptr, "out");                   \
    if (st != BF_OK) return st;                                   \
    return guarded([&]() { *out = (expr); });                     \
  }

BF_SCALAR1(bf_h2, bf::kernels::h2(x))
BF_SCALAR1(bf_h2_inv, bf::kernels::h2_inv(x))
BF_SCALAR1(bf_j, bf::kernels::j(x))
BF_SCALAR1(bf_eta, bf::kernels::eta(x))
BF_SCALAR1(bf_big_l, bf::kernels::big_l(x))
BF_SCALAR1(bf_big_l_inv, bf::kernels::big_l_inv(x))
BF_SCALAR1(bf_crossover, bf::kernels::crossover(x))

#undef BF_SCALAR1

bf_status bf_d2(double x, double y, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::d2(x, y); });
}

bf_status bf_binary_conv(double a, double b, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::binary_conv(a, b); });
}

bf_status bf_solve_r(double x, double y, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::solve_r(x, y); });
}

bf_status bf_phi(double x, double y, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::phi(x, y); });
}

bf_status bf_zeta_symmetric(double m, double e, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::zeta_symmetric(m, e); });
}

bf_status bf_kappa(double u, double w, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::kappa(u, w); });
}

bf_status bf_zeta_lower_bound(double mu, double mw, double eu, double ew,
                              double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::zeta_lower_bound(mu, mw, eu, ew); });
}

bf_status bf_conjecture5_margin(double mu, double mw, double eu, double ew,
                                double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::conjecture5_margin(mu, mw, eu, ew); });
}

bf_status bf_c4_reflection_margin(double u, double w, double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::kernels::c4_reflection_margin(u, w); });
}

bf_status bf_c4_midpoint_margin(double a1, double b1, double a2, double b2,
                                double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { *out = bf::kernels::c4_midpoint_margin(a1, b1, a2, b2); });
}

bf_status bf_ode_lower_bound(double mean, double gamma0, double t, double* value,
                             int* saturated) {
  bf_status st = need(value != nullptr, "value");
  if (st != BF_OK) return st;
  return guarded([&]() {
    auto r = bf::flow::ode_lower_bound(mean, gamma0, t);
    *value = r.value;
    if (saturated) *saturated = r.saturated ? 1 : 0;
  });
}

bf_status bf_log_t_grid(int points, double t_min, double t_max, double* out_ts) {
  bf_status st = need(out_ts != nullptr && points >= 1, "out_ts/points");
  if (st != BF_OK) return st;
  return guarded([&]() {
    auto ts = bf::flow::log_t_grid(points, t_min, t_max);
    for (int i = 0; i < points; ++i) out_ts[i] = ts[size_t(i)];
  });
}

/* ---- candidates ---- */

bf_status bf_candidate_open(const char* name, bf_candidate** out) {
  bf_status st = need(name != nullptr && out != nullptr, "name/out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = new bf_candidate{bf::psi::open_candidate(name)}; });
}

void bf_candidate_free(bf_candidate* c) { delete c; }

bf_status bf_candidate_family(const bf_candidate* c, int* family) {
  bf_status st = need(c != nullptr && family != nullptr, "candidate/family");
  if (st != BF_OK) return st;
  *family = c->impl.family == bf::psi::Family::entropy ? 0 : 1;
  return BF_OK;
}

bf_status bf_candidate_eval(const bf_candidate* c, double a, double b, double* out) {
  bf_status st = need(c != nullptr && out != nullptr, "candidate/out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = c->impl.eval(a, b); });
}

bf_status bf_psi_margin(const bf_candidate* c, int k, const double* weights,
                        const double* u, const double* w, double* out) {
  bf_status st = need(c && k >= 1 && weights && u && w && out, "instance");
  if (st != BF_OK) return st;
  return guarded([&]() {
    bf::psi::Instance inst;
    inst.weights.assign(weights, weights + k);
    inst.u.assign(u, u + k);
    inst.w.assign(w, w + k);
    if (c->impl.family == bf::psi::Family::entropy)
      *out = bf::psi::psi_margin<double>(c->impl, inst);
    else
      *out = bf::psi::psi_h_margin<double>(c->impl, inst);
  });
}

bf_status bf_two_point_sides(double u, double w, double* lhs, double* rhs) {
  bf_status st = need(lhs != nullptr && rhs != nullptr, "lhs/rhs");
  if (st != BF_OK) return st;
  return guarded([&]() { bf::psi::two_point_sides(u, w, lhs, rhs); });
}

bf_status bf_psi_hat_h_value(double a1, double b1, double a2, double b2,
                             double* out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::psi::psi_hat_h_value(a1, b1, a2, b2); });
}

bf_status bf_averaged_h_margin(int k, const double* weights, const double* u,
                               const double* w, double* out) {
  bf_status st = need(k >= 1 && weights && u && w && out, "instance");
  if (st != BF_OK) return st;
  return guarded([&]() {
    bf::psi::Instance inst;
    inst.weights.assign(weights, weights + k);
    inst.u.assign(u, u + k);
    inst.w.assign(w, w + k);
    *out = bf::psi::averaged_h_margin<double>(inst);
  });
}

/* ---- predicates ---- */

bf_status bf_predicate_named(const char* name, int n, double eps,
                             bf_predicate** out) {
  bf_status st = need(name != nullptr && out != nullptr, "name/out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { *out = new bf_predicate{bf::flow::make_named(name, n, eps)}; });
}

bf_status bf_predicate_from_mask(int n, uint64_t mask, double eps,
                                 bf_predicate** out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { *out = new bf_predicate{bf::flow::from_mask(n, mask, eps)}; });
}

bf_status bf_predicate_read(const char* path, double eps, bf_predicate** out) {
  bf_status st = need(path != nullptr && out != nullptr, "path/out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { *out = new bf_predicate{bf::flow::read_file(path, eps)}; });
}

bf_status bf_predicate_from_values(int n, const double* values,
                                   bf_predicate** out) {
  bf_status st = need(values != nullptr && out != nullptr, "values/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    bf::flow::Predicate p;
    p.n = n;
    if (n < 1 || n > 24) throw bf::domain_error("predicate dimension out of range");
    p.v.assign(values, values + (size_t{1} << n));
    bf::flow::validate(p);
    *out = new bf_predicate{std::move(p)};
  });
}

bf_status bf_predicate_soften(const bf_predicate* p, double eps,
                              bf_predicate** out) {
  bf_status st = need(p != nullptr && out != nullptr, "predicate/out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { *out = new bf_predicate{bf::flow::soften(p->impl, eps)}; });
}

void bf_predicate_free(bf_predicate* p) { delete p; }

bf_status bf_predicate_n(const bf_predicate* p, int* n) {
  bf_status st = need(p != nullptr && n != nullptr, "predicate/n");
  if (st != BF_OK) return st;
  *n = p->impl.n;
  return BF_OK;
}

bf_status bf_predicate_value(const bf_predicate* p, uint64_t index, double* out) {
  bf_status st = need(p != nullptr && out != nullptr, "predicate/out");
  if (st != BF_OK) return st;
  if (index >= p->impl.v.size())
    return fail(BF_ERR_INVALID_ARGUMENT, "vertex index out of range");
  *out = p->impl.v[index];
  return BF_OK;
}

/* ---- flow ---- */

#define BF_FLOW_T(name, expr)                                           \
  bf_status name(const bf_predicate* p, double t, double* out) {        \
    bf_status st = need(p != nullptr && out != nullptr, "predicate/out"); \
    if (st != BF_OK) return st;                                         \
    return guarded([&]() { *out = (expr); });                           \
  }

BF_FLOW_T(bf_flow_gamma, bf::flow::gamma(p->impl, t))
BF_FLOW_T(bf_flow_gamma_derivative, bf::flow::gamma_derivative(p->impl, t))
BF_FLOW_T(bf_flow_mi, bf::flow::mutual_information(p->impl, t))
BF_FLOW_T(bf_flow_c1_margin, bf::flow::conjecture1_margin(p->impl, t))
BF_FLOW_T(bf_flow_derivative_margin, bf::flow::derivative_bound_margin(p->impl, t))
BF_FLOW_T(bf_hellinger_r_derivative, bf::hell::r_derivative(p->impl, t))

#undef BF_FLOW_T

bf_status bf_flow_mean(const bf_predicate* p, double* out) {
  bf_status st = need(p != nullptr && out != nullptr, "predicate/out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::flow::mean_value<double>(p->impl); });
}

bf_status bf_hellinger_ef(const bf_predicate* p, double* out) {
  bf_status st = need(p != nullptr && out != nullptr, "predicate/out");
  if (st != BF_OK) return st;
  return guarded([&]() { *out = bf::hell::ef_value<double>(p->impl); });
}

bf_status bf_hellinger_r(const bf_predicate* p, double t, double* out,
                         int* clipped) {
  bf_status st = need(p != nullptr && out != nullptr, "predicate/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    int c = 0;
    *out = bf::hell::r_value(p->impl, t, &c);
    if (clipped) *clipped = c;
  });
}

bf_status bf_hellinger_c2_margin(const bf_predicate* p, double t, double* out,
                                 int* clipped) {
  bf_status st = need(p != nullptr && out != nullptr, "predicate/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    int c = 0;
    *out = bf::hell::conjecture2_margin(p->impl, t, &c);
    if (clipped) *clipped = c;
  });
}

/* ---- oracle ---- */

bf_status bf_zeta_oracle(double mu, double mw, double eu, double ew, int restarts,
                         uint64_t seed, bf_zeta_result** out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    *out = new bf_zeta_result{
        bf::zeta::oracle(bf::zeta::Query{mu, mw, eu, ew}, restarts, seed)};
  });
}

void bf_zeta_result_free(bf_zeta_result* r) { delete r; }

bf_status bf_zeta_result_value(const bf_zeta_result* r, double* out) {
  bf_status st = need(r != nullptr && out != nullptr, "result/out");
  if (st != BF_OK) return st;
  *out = r->impl.value;
  return BF_OK;
}

bf_status bf_zeta_result_residual(const bf_zeta_result* r, double* out) {
  bf_status st = need(r != nullptr && out != nullptr, "result/out");
  if (st != BF_OK) return st;
  *out = r->impl.residual;
  return BF_OK;
}

bf_status bf_zeta_result_feasible(const bf_zeta_result* r, int* out) {
  bf_status st = need(r != nullptr && out != nullptr, "result/out");
  if (st != BF_OK) return st;
  *out = r->impl.feasible ? 1 : 0;
  return BF_OK;
}

bf_status bf_zeta_result_atom_count(const bf_zeta_result* r, int* out) {
  bf_status st = need(r != nullptr && out != nullptr, "result/out");
  if (st != BF_OK) return st;
  *out = static_cast<int>(r->impl.atoms.size());
  return BF_OK;
}

bf_status bf_zeta_result_atom(const bf_zeta_result* r, int i, double* weight,
                              double* u, double* w) {
  bf_status st = need(r != nullptr && weight && u && w, "result/outs");
  if (st != BF_OK) return st;
  if (i < 0 || size_t(i) >= r->impl.atoms.size())
    return fail(BF_ERR_INVALID_ARGUMENT, "atom index out of range");
  *weight = r->impl.atoms[size_t(i)].weight;
  *u = r->impl.atoms[size_t(i)].u;
  *w = r->impl.atoms[size_t(i)].w;
  return BF_OK;
}

/* ---- reports ---- */

void bf_report_free(bf_report* r) { delete r; }

bf_status bf_report_serialize(const bf_report* r, int as_csv, char** out) {
  bf_status st = need(r != nullptr && out != nullptr, "report/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::string s = as_csv ? bf::report::serialize_csv(r->impl)
                           : bf::report::serialize_json(r->impl);
    *out = dup_string(s);
    if (!*out) throw std::bad_alloc();
  });
}

bf_status bf_report_write(const bf_report* r, const char* path, int as_csv) {
  bf_status st = need(r != nullptr && path != nullptr, "report/path");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::string s = as_csv ? bf::report::serialize_csv(r->impl)
                           : bf::report::serialize_json(r->impl);
    bf::report::write_atomic(path, s);
  });
}

bf_status bf_report_classification(const bf_report* r, char** out) {
  bf_status st = need(r != nullptr && out != nullptr, "report/out");
  if (st != BF_OK) return st;
  const bf::report::Json* v = walk(r->impl, "results.classification");
  if (!v || !v->is_string())
    return fail(BF_ERR_INVALID_ARGUMENT, "report has no classification");
  *out = dup_string(v->get<std::string>());
  return *out ? BF_OK : fail(BF_ERR_INTERNAL, "out of memory");
}

bf_status bf_report_min_margin(const bf_report* r, double* out) {
  bf_status st = need(r != nullptr && out != nullptr, "report/out");
  if (st != BF_OK) return st;
  const bf::report::Json* v = walk(r->impl, "results.min_margin");
  if (!v || !v->is_number())
    return fail(BF_ERR_INVALID_ARGUMENT, "report has no min_margin");
  *out = v->get<double>();
  return BF_OK;
}

bf_status bf_report_exit_code(const bf_report* r, int* out) {
  bf_status st = need(r != nullptr && out != nullptr, "report/out");
  if (st != BF_OK) return st;
  const bf::report::Json* v = walk(r->impl, "results.classification");
  if (!v || !v->is_string())
    return fail(BF_ERR_INVALID_ARGUMENT, "report has no classification");
  *out = bf::classification_exit_code(v->get<std::string>());
  return BF_OK;
}

bf_status bf_report_get_number(const bf_report* r, const char* path, double* out) {
  bf_status st = need(r != nullptr && path != nullptr && out != nullptr,
                      "report/path/out");
  if (st != BF_OK) return st;
  const bf::report::Json* v = walk(r->impl, path);
  if (!v || !v->is_number())
    return fail(BF_ERR_INVALID_ARGUMENT,
                std::string("no numeric field at '") + path + "'");
  *out = v->get<double>();
  return BF_OK;
}

bf_status bf_report_get_int(const bf_report* r, const char* path, int64_t* out) {
  bf_status st = need(r != nullptr && path != nullptr && out != nullptr,
                      "report/path/out");
  if (st != BF_OK) return st;
  const bf::report::Json* v = walk(r->impl, path);
  if (!v || !v->is_number_integer())
    return fail(BF_ERR_INVALID_ARGUMENT,
                std::string("no integer field at '") + path + "'");
  *out = v->get<int64_t>();
  return BF_OK;
}

bf_status bf_report_get_string(const bf_report* r, const char* path, char** out) {
  bf_status st = need(r != nullptr && path != nullptr && out != nullptr,
                      "report/path/out");
  if (st != BF_OK) return st;
  const bf::report::Json* v = walk(r->impl, path);
  if (!v || !v->is_string())
    return fail(BF_ERR_INVALID_ARGUMENT,
                std::string("no string field at '") + path + "'");
  *out = dup_string(v->get<std::string>());
  return *out ? BF_OK : fail(BF_ERR_INTERNAL, "out of memory");
}

bf_status bf_report_replay(const bf_report* r, char** payload, char** extension) {
  bf_status st = need(r != nullptr && payload != nullptr && extension != nullptr,
                      "report/payload/extension");
  if (st != BF_OK) return st;
  return guarded([&]() {
    *payload = dup_string(bf::scan::replay_payload(r->impl));
    *extension = dup_string(bf::scan::replay_extension(r->impl));
    if (!*payload || !*extension) throw std::bad_alloc();
  });
}

bf_status bf_report_write_replay(const bf_report* r, const char* base_path,
                                 int* wrote) {
  bf_status st = need(r != nullptr && base_path != nullptr, "report/base_path");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::string payload = bf::scan::replay_payload(r->impl);
    if (payload.empty()) {
      if (wrote) *wrote = 0;
      return;
    }
    bf::report::write_atomic(base_path + bf::scan::replay_extension(r->impl),
                             payload);
    if (wrote) *wrote = 1;
  });
}

/* ---- scans ---- */

void bf_scan_config_default(bf_scan_config* cfg) {
  if (!cfg) return;
  cfg->seed = 0;
  cfg->samples = 100000;
  cfg->jobs = 1;
  cfg->tol = 1e-9;
  cfg->refine = 1;
  cfg->refine_top_k = 10;
  cfg->refine_iters = 200;
}

bf_status bf_scan_membership(const bf_candidate* c, const bf_scan_config* cfg,
                             const char* check_id, bf_report** out) {
  bf_status st = need(c && cfg && check_id && out, "candidate/cfg/check_id/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::string id = check_id;
    if (id != "scan-c3" && id != "verify-psi")
      throw bf::domain_error("check_id must be scan-c3 or verify-psi");
    bf::report::Json rep = bf::scan::scan_membership(c->impl, to_config(cfg), id);
    out_report(std::move(rep), out);
  });
}

bf_status bf_scan_c4(const bf_scan_config* cfg, bf_report** out) {
  bf_status st = need(cfg != nullptr && out != nullptr, "cfg/out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { out_report(bf::scan::scan_c4(to_config(cfg)), out); });
}

bf_status bf_scan_c5(const bf_scan_config* cfg, bf_report** out) {
  bf_status st = need(cfg != nullptr && out != nullptr, "cfg/out");
  if (st != BF_OK) return st;
  return guarded(
      [&]() { out_report(bf::scan::scan_c5(to_config(cfg)), out); });
}

bf_status bf_sweep_flow(int n, double eps, int balanced_only, int margin_kind,
                        const double* ts, int t_count, int jobs, bf_report** out) {
  bf_status st = need(ts != nullptr && t_count >= 1 && out != nullptr, "ts/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::vector<double> grid(ts, ts + t_count);
    out_report(bf::scan::sweep_flow(n, eps, balanced_only != 0, margin_kind, grid,
                                    jobs < 1 ? 1 : jobs),
               out);
  });
}

bf_status bf_flow_trace(const bf_predicate* p, const double* ts, int t_count,
                        const char* source, double eps, bf_report** out) {
  bf_status st =
      need(p && ts && t_count >= 1 && source && out, "predicate/ts/source/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::vector<double> grid(ts, ts + t_count);
    out_report(bf::scan::flow_trace(p->impl, grid, source, eps), out);
  });
}

bf_status bf_hellinger_trace(const bf_predicate* p, const double* ts, int t_count,
                             const char* source, double eps, bf_report** out) {
  bf_status st =
      need(p && ts && t_count >= 1 && source && out, "predicate/ts/source/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    std::vector<double> grid(ts, ts + t_count);
    out_report(bf::scan::hellinger_trace(p->impl, grid, source, eps), out);
  });
}

bf_status bf_appendix(const char* which, uint64_t seed, int jobs, bf_report** out) {
  bf_status st = need(which != nullptr && out != nullptr, "which/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    out_report(bf::scan::appendix_report(which, seed, jobs < 1 ? 1 : jobs), out);
  });
}

bf_status bf_zeta_grid(int grid, int restarts, uint64_t seed, int jobs,
                       bf_report** out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    out_report(bf::scan::zeta_grid_report(grid, restarts, seed, jobs < 1 ? 1 : jobs),
               out);
  });
}

bf_status bf_zeta_query(double mu, double mw, double eu, double ew, int restarts,
                        uint64_t seed, bf_report** out) {
  bf_status st = need(out != nullptr, "out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    out_report(bf::scan::zeta_query_report(mu, mw, eu, ew, restarts, seed), out);
  });
}

bf_status bf_replay(const char* path, const bf_candidate* cand, double tol,
                    bf_report** out) {
  bf_status st = need(path != nullptr && out != nullptr, "path/out");
  if (st != BF_OK) return st;
  return guarded([&]() {
    out_report(
        bf::scan::replay_file(path, cand ? &cand->impl : nullptr, tol), out);
  });
}

} /* extern "C" */
