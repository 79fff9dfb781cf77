#include "convexity_checks.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "double_double.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace bf::conv {

namespace {

struct Best {
  double margin = std::numeric_limits<double>::infinity();
  int64_t idx = -1;
  std::string kind;
  std::vector<double> params;

  bool offer(double m, int64_t i, const char* kind_, std::initializer_list<double> ps) {
    if (m < margin || (m == margin && (idx < 0 || i < idx))) {
      margin = m;
      idx = i;
      kind = kind_;
      params = ps;
      return true;
    }
    return false;
  }

  void merge(const Best& o) {
    if (o.idx < 0) return;
    if (o.margin < margin || (o.margin == margin && (idx < 0 || o.idx < idx))) *this = o;
  }
};

// Worker-local minima merged by (margin, index), so the result does not
// depend on how the index range was partitioned.
template <class F>
Best scan_min(int64_t n, int jobs, F&& per_index) {
  Best global;
  std::mutex mu;
  parallel_for_blocks(n, jobs, [&](int64_t b, int64_t e) {
    Best local;
    for (int64_t i = b; i < e; ++i) per_index(i, local);
    std::lock_guard<std::mutex> lock(mu);
    global.merge(local);
  });
  return global;
}

Rng stream(uint64_t seed, int ordinal, int64_t i) {
  return substream(seed, kSaltConvexity,
                   (static_cast<uint64_t>(ordinal) << 40) | static_cast<uint64_t>(i));
}

CheckOutcome finish(const std::string& name, int64_t samples, double tol, Best best,
                    const std::function<double()>& dd_eval) {
  CheckOutcome out;
  out.name = name;
  out.samples = samples;
  out.min_margin = best.margin;
  out.argmin_kind = best.kind;
  out.argmin = best.params;
  out.tolerance = tol;
  out.verdict = classify_margin(best.margin, tol, /*theorem=*/true, dd_eval);
  return out;
}

CheckOutcome check_jlinv(uint64_t seed, int jobs) {
  const int64_t pairs = 10000, grid = 10000;
  Best best = scan_min(pairs + grid, jobs, [&](int64_t i, Best& local) {
    if (i < pairs) {
      Rng g = stream(seed, 0, i);
      double x1 = g.uniform(1e-6, 50.0);
      double x2 = g.uniform(1e-6, 50.0);
      local.offer(jlinv_midpoint_margin(x1, x2), i, "midpoint", {x1, x2});
    } else {
      double u = 0.5 * static_cast<double>(i - pairs + 1) / static_cast<double>(grid);
      local.offer(jlinv_curvature_margin(u), i, "curvature", {u});
    }
  });
  auto dd = [best]() {
    if (best.kind == "midpoint")
      return to_double(jlinv_midpoint_margin(Dd(best.params[0]), Dd(best.params[1])));
    return to_double(jlinv_curvature_margin(Dd(best.params[0])));
  };
  return finish("jlinv-convex", pairs + grid, 1e-10, best, dd);
}

CheckOutcome check_ratio(uint64_t seed, int jobs) {
  (void)seed;
  const int64_t points = 10000;
  const double lo = 1e-4, hi = 100.0;
  auto grid_x = [&](int64_t k) {
    return lo * std::exp(std::log(hi / lo) * static_cast<double>(k) /
                         static_cast<double>(points - 1));
  };
  Best best = scan_min(points - 1, jobs, [&](int64_t i, Best& local) {
    double a = grid_x(i), b = grid_x(i + 1);
    local.offer(ratio_margin(a, b), i, "adjacent", {a, b});
  });
  auto dd = [best]() {
    return to_double(ratio_margin(Dd(best.params[0]), Dd(best.params[1])));
  };
  return finish("ratio-decreasing", points - 1, 1e-10, best, dd);
}

CheckOutcome check_perspective(uint64_t seed, int jobs) {
  const int64_t n = 100000;
  Best best = scan_min(n, jobs, [&](int64_t i, Best& local) {
    Rng g = stream(seed, 2, i);
    double x1 = g.uniform(-5.0, 5.0), y1 = g.uniform(1e-6, 10.0);
    double x2 = g.uniform(-5.0, 5.0), y2 = g.uniform(1e-6, 10.0);
    local.offer(perspective_midpoint_margin(x1, y1, x2, y2), i, "midpoint",
                {x1, y1, x2, y2});
  });
  auto dd = [best]() {
    return to_double(perspective_midpoint_margin(Dd(best.params[0]), Dd(best.params[1]),
                                                 Dd(best.params[2]), Dd(best.params[3])));
  };
  return finish("perspective-convex", n, 1e-10, best, dd);
}

CheckOutcome check_fb(uint64_t seed, int jobs) {
  (void)seed;
  const int64_t n = 10000;
  Best best = scan_min(n, jobs, [&](int64_t i, Best& local) {
    double b = static_cast<double>(i + 1) / static_cast<double>(n);
    local.offer(fb_margin(b), i, "grid", {b});
  });
  auto dd = [best]() { return to_double(fb_margin(Dd(best.params[0]))); };
  return finish("fb-nonneg", n, 1e-12, best, dd);
}

CheckOutcome check_z(uint64_t seed, int jobs) {
  const int64_t n = 10000;
  Best best = scan_min(n, jobs, [&](int64_t i, Best& local) {
    Rng g = stream(seed, 4, i);
    double a = g.open01(1e-6), b = g.open01(1e-6);
    double u = std::max(a, b), w = std::min(a, b);
    local.offer(z_identity_margin(u, w), i, "pair", {u, w});
  });
  auto dd = [best]() {
    return to_double(z_identity_margin(Dd(best.params[0]), Dd(best.params[1])));
  };
  return finish("z-identity", n, 1e-12, best, dd);
}

} // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "jlinv-convex", "ratio-decreasing", "perspective-convex", "fb-nonneg",
      "z-identity"};
  return names;
}

CheckOutcome run_check(const std::string& name, uint64_t seed, int jobs) {
  if (name == "jlinv-convex") return check_jlinv(seed, jobs);
  if (name == "ratio-decreasing") return check_ratio(seed, jobs);
  if (name == "perspective-convex") return check_perspective(seed, jobs);
  if (name == "fb-nonneg") return check_fb(seed, jobs);
  if (name == "z-identity") return check_z(seed, jobs);
  throw domain_error("unknown convexity check '" + name + "'");
}

std::vector<CheckOutcome> run_checks(const std::string& which, uint64_t seed, int jobs) {
  std::vector<std::string> names;
  if (which.empty() || which == "all") {
    names = check_names();
  } else {
    std::string cur;
    for (char ch : which + ",") {
      if (ch == ',') {
        if (!cur.empty()) names.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }
  std::vector<CheckOutcome> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(run_check(n, seed, jobs));
  return out;
}

} // namespace bf::conv
