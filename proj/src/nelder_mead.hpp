#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace bf {

struct NmResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
};

/*
 * Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
 * shrink 1/2) with deterministic tie-breaking. The objectives here are
 * cheap and low-dimensional; no restarts or adaptive tweaks.
 */
inline NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                            const std::vector<double>& x0, double step, int max_iter) {
  const size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<size_t> order(n + 1);
  auto sort_order = [&]() {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return vals[a] < vals[b]; });
  };

  for (int it = 0; it < max_iter; ++it) {
    sort_order();
    size_t best = order[0], worst = order[n], second = order[n - 1];
    if (vals[worst] - vals[best] < 1e-15 * (1.0 + std::fabs(vals[best]))) break;

    std::vector<double> centroid(n, 0.0);
    for (size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (size_t d = 0; d < n; ++d) centroid[d] += pts[k][d];
    }
    for (size_t d = 0; d < n; ++d) centroid[d] /= static_cast<double>(n);

    auto blend = [&](double c) {
      std::vector<double> x(n);
      for (size_t d = 0; d < n; ++d) x[d] = centroid[d] + c * (centroid[d] - pts[worst][d]);
      return x;
    };

    std::vector<double> xr = blend(1.0);
    double fr = eval(xr);
    if (fr < vals[order[0]]) {
      std::vector<double> xe = blend(2.0);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = std::move(xr);
      vals[worst] = fr;
    } else {
      bool outside = fr < vals[worst];
      std::vector<double> xc = blend(outside ? 0.5 : -0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = std::move(xc);
        vals[worst] = fc;
      } else {
        for (size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (size_t d = 0; d < n; ++d)
            pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
          vals[k] = eval(pts[k]);
        }
      }
    }
  }

  sort_order();
  return {pts[order[0]], vals[order[0]], evals};
}

} // namespace bf
