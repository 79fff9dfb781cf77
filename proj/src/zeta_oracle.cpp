#include "zeta_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "nelder_mead.hpp"
#include "rng.hpp"
#include "scalar_kernels.hpp"

namespace bf::zeta {

namespace {

constexpr int kInterior = 5;           // optimizable atoms
constexpr int kWeights = kInterior + 2; // plus the two zero-cost corners
constexpr int kDim = kWeights + 2 * kInterior;
constexpr double kCoordFloor = 1e-12;
constexpr double kFeasTol = 1e-6;

double sigmoid(double x) {
  double s = 1.0 / (1.0 + std::exp(-x));
  return std::clamp(s, kCoordFloor, 1.0 - kCoordFloor);
}

double logit(double p) {
  p = std::clamp(p, 1e-15, 1.0 - 1e-15);
  return std::log(p / (1.0 - p));
}

struct Decoded {
  std::array<double, kWeights> p;   // corner00, corner11, interior x5
  std::array<double, kInterior> u;
  std::array<double, kInterior> w;
};

Decoded decode(const std::vector<double>& th) {
  Decoded d;
  double mx = th[0];
  for (int i = 1; i < kWeights; ++i) mx = std::max(mx, th[i]);
  double tot = 0;
  for (int i = 0; i < kWeights; ++i) {
    d.p[i] = std::exp(th[i] - mx);
    tot += d.p[i];
  }
  for (int i = 0; i < kWeights; ++i) d.p[i] /= tot;
  for (int i = 0; i < kInterior; ++i) {
    d.u[i] = sigmoid(th[kWeights + i]);
    d.w[i] = sigmoid(th[kWeights + kInterior + i]);
  }
  return d;
}

// Moment residuals: (E U, E W, E h2(U), E h2(W)) minus targets. Mass is
// exact by construction of the softmax.
std::array<double, 4> residuals(const Decoded& d, const Query& q) {
  double mu = d.p[1], mw = d.p[1], eu = 0, ew = 0; // corner (1,1) carries mean mass
  for (int i = 0; i < kInterior; ++i) {
    double p = d.p[2 + i];
    mu += p * d.u[i];
    mw += p * d.w[i];
    eu += p * kernels::h2(d.u[i]);
    ew += p * kernels::h2(d.w[i]);
  }
  return {mu - q.mu, mw - q.mw, eu - q.eu, ew - q.ew};
}

double objective(const Decoded& d) {
  double acc = 0;
  for (int i = 0; i < kInterior; ++i) acc += d.p[2 + i] * pair_cost(d.u[i], d.w[i]);
  return acc;
}

struct AtomList {
  std::vector<Atom> a;

  void add(double p, double u, double w) {
    if (p > 0) a.push_back({p, u, w});
  }
};

// Pure-weight Gaussian elimination helpers -------------------------------

// Solves the 5x5 system M x = b in place; returns false when singular.
bool solve5(std::array<std::array<double, 5>, 5>& m, std::array<double, 5>& b) {
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-13) return false;
    std::swap(m[piv], m[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < 5; ++r) {
      if (r == col) continue;
      double f = m[r][col] / m[col][col];
      if (f == 0) continue;
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int i = 0; i < 5; ++i) b[i] /= m[i][i];
  return true;
}

std::array<double, 5> constraint_row(const Atom& a) {
  return {1.0, a.u, a.w, kernels::h2(a.u), kernels::h2(a.w)};
}

std::array<double, 5> moment_error(const std::vector<Atom>& atoms, const Query& q) {
  std::array<double, 5> e = {-1.0, -q.mu, -q.mw, -q.eu, -q.ew};
  for (const Atom& a : atoms) {
    auto row = constraint_row(a);
    for (int r = 0; r < 5; ++r) e[r] += a.weight * row[r];
  }
  return e;
}

double max_abs(const std::array<double, 5>& e) {
  double m = 0;
  for (double x : e) m = std::max(m, std::fabs(x));
  return m;
}

// Comonotone rearrangement: the pair cost has negative cross-difference,
// so among couplings with the same u- and w-marginals the comonotone one
// (sorted u paired with sorted w, northwest-corner weights) minimizes the
// expected cost. May grow the support to at most 2s-1 atoms.
std::vector<Atom> rearrange(const std::vector<Atom>& interior) {
  if (interior.size() <= 1) return interior;
  std::vector<std::pair<double, double>> us, ws; // (coord, weight)
  us.reserve(interior.size());
  ws.reserve(interior.size());
  for (const Atom& a : interior) {
    us.push_back({a.u, a.weight});
    ws.push_back({a.w, a.weight});
  }
  std::sort(us.begin(), us.end());
  std::sort(ws.begin(), ws.end());
  std::vector<Atom> out;
  size_t i = 0, j = 0;
  while (i < us.size() && j < ws.size()) {
    double take = std::min(us[i].second, ws[j].second);
    if (take > 0) out.push_back({take, us[i].first, ws[j].first});
    us[i].second -= take;
    ws[j].second -= take;
    if (us[i].second <= 1e-18) ++i;
    if (ws[j].second <= 1e-18) ++j;
  }
  return out;
}

void snap_and_merge(std::vector<Atom>& atoms) {
  // Snap atoms essentially at the zero-cost corners onto them exactly.
  for (Atom& a : atoms) {
    if (a.u <= 1e-7 && a.w <= 1e-7) a.u = a.w = 0.0;
    if (a.u >= 1.0 - 1e-7 && a.w >= 1.0 - 1e-7) a.u = a.w = 1.0;
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
    if (x.u != y.u) return x.u < y.u;
    return x.w < y.w;
  });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty()) {
      Atom& b = merged.back();
      if (std::fabs(a.u - b.u) < 1e-7 && std::fabs(a.w - b.w) < 1e-7) {
        double tot = a.weight + b.weight;
        bool corner = (b.u == b.w) && (b.u == 0.0 || b.u == 1.0);
        if (!corner && tot > 0) {
          b.u = (b.u * b.weight + a.u * a.weight) / tot;
          b.w = (b.w * b.weight + a.w * a.weight) / tot;
        }
        b.weight = tot;
        continue;
      }
    }
    merged.push_back(a);
  }
  atoms.swap(merged);
}

// Null vector of the 5 x s constraint matrix (s > 5), used to walk weights
// toward a vertex of the feasible polytope without moving any moment.
bool null_vector(const std::vector<Atom>& atoms, std::vector<double>& nu) {
  const int s = static_cast<int>(atoms.size());
  std::vector<std::array<double, 5>> cols(s);
  for (int k = 0; k < s; ++k) cols[k] = constraint_row(atoms[k]);
  // Row-reduce the 5 x s matrix, tracking pivot columns.
  std::vector<std::vector<double>> m(5, std::vector<double>(s));
  for (int r = 0; r < 5; ++r)
    for (int k = 0; k < s; ++k) m[r][k] = cols[k][r];
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < s && row < 5; ++col) {
    int piv = row;
    for (int r = row + 1; r < 5; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-11) continue;
    std::swap(m[piv], m[row]);
    for (int r = 0; r < 5; ++r) {
      if (r == row) continue;
      double f = m[r][col] / m[row][col];
      if (f == 0) continue;
      for (int c = col; c < s; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  // First free column yields a null vector.
  int free_col = -1;
  for (int col = 0; col < s; ++col) {
    if (std::find(pivot_col.begin(), pivot_col.end(), col) == pivot_col.end()) {
      free_col = col;
      break;
    }
  }
  if (free_col < 0) return false;
  nu.assign(s, 0.0);
  nu[free_col] = 1.0;
  for (size_t r = 0; r < pivot_col.size(); ++r)
    nu[pivot_col[r]] = -m[r][free_col] / m[r][pivot_col[r]];
  return true;
}

// Reduce the support to at most 5 atoms; the objective is linear in the
// weights, so each step moves along a constraint null vector in the
// non-increasing direction until a weight hits zero.
void reduce_support(std::vector<Atom>& atoms) {
  for (int guard = 0; guard < 64 && atoms.size() > 5; ++guard) {
    std::vector<double> nu;
    if (!null_vector(atoms, nu)) return;
    double dobj = 0;
    for (size_t k = 0; k < atoms.size(); ++k)
      dobj += nu[k] * pair_cost(atoms[k].u, atoms[k].w);
    if (dobj > 0)
      for (double& x : nu) x = -x;
    // Mass row forces mixed signs in nu, so a blocking weight exists.
    double tstar = -1;
    for (size_t k = 0; k < atoms.size(); ++k) {
      if (nu[k] < -1e-15) {
        double cap = atoms[k].weight / -nu[k];
        if (tstar < 0 || cap < tstar) tstar = cap;
      }
    }
    if (tstar < 0) {
      for (double& x : nu) x = -x;
      for (size_t k = 0; k < atoms.size(); ++k) {
        if (nu[k] < -1e-15) {
          double cap = atoms[k].weight / -nu[k];
          if (tstar < 0 || cap < tstar) tstar = cap;
        }
      }
      if (tstar < 0) return;
    }
    for (size_t k = 0; k < atoms.size(); ++k) atoms[k].weight += tstar * nu[k];
    std::vector<Atom> kept;
    for (const Atom& a : atoms)
      if (a.weight > 1e-14) kept.push_back(a);
    if (kept.size() >= atoms.size()) {
      // No progress (numerical); drop the smallest weight outright.
      size_t worst = 0;
      for (size_t k = 1; k < kept.size(); ++k)
        if (kept[k].weight < kept[worst].weight) worst = k;
      kept.erase(kept.begin() + worst);
    }
    atoms.swap(kept);
  }
}

// Minimum-norm weight correction p' = p + A^T (A A^T)^{-1} (b - A p),
// clipping negatives and retrying on the surviving support.
void polish_weights(std::vector<Atom>& atoms, const Query& q) {
  for (int pass = 0; pass < 10; ++pass) {
    const int s = static_cast<int>(atoms.size());
    if (s == 0) return;
    std::vector<std::array<double, 5>> rows(s);
    for (int k = 0; k < s; ++k) rows[k] = constraint_row(atoms[k]);
    auto err = moment_error(atoms, q);
    if (max_abs(err) < 1e-14) return;
    std::array<std::array<double, 5>, 5> gram{};
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) {
        double acc = 0;
        for (int k = 0; k < s; ++k) acc += rows[k][r] * rows[k][c];
        gram[r][c] = acc;
      }
    std::array<double, 5> rhs;
    for (int r = 0; r < 5; ++r) rhs[r] = -err[r];
    if (!solve5(gram, rhs)) return;
    bool clipped = false;
    for (int k = 0; k < s; ++k) {
      double delta = 0;
      for (int r = 0; r < 5; ++r) delta += rows[k][r] * rhs[r];
      atoms[k].weight += delta;
      if (atoms[k].weight < 0) {
        atoms[k].weight = 0;
        clipped = true;
      }
    }
    if (!clipped) return;
    std::vector<Atom> kept;
    for (const Atom& a : atoms)
      if (a.weight > 0) kept.push_back(a);
    atoms.swap(kept);
  }
}

// Feasibility restoration: Gauss-Newton on the five moment errors over the
// full parameter set, weights and interior coordinates together (atoms
// snapped onto a zero-cost corner keep their coordinates). The staged
// penalty leaves the simplex result a quadratic-penalty equilibrium away
// from the constraint surface, which weight-only polishing cannot close
// when the gap lives in the coordinates. The minimum-norm step
// J^T (J J^T)^{-1} (-e) scales each coordinate move by its atom's weight,
// so light atoms drift instead of teleporting. Commits only on improvement.
void restore_feasibility(std::vector<Atom>& atoms, const Query& q) {
  if (atoms.empty()) return;
  std::vector<Atom> work = atoms;
  const double entry = max_abs(moment_error(work, q));
  if (entry < 1e-13) return;
  double best = entry;
  std::vector<Atom> best_atoms = work;
  for (int it = 0; it < 25; ++it) {
    auto e = moment_error(work, q);
    double r = max_abs(e);
    if (r < best) {
      best = r;
      best_atoms = work;
    }
    if (r < 1e-13) break;
    std::vector<std::array<double, 5>> cols;
    std::vector<std::pair<int, int>> ref; // (atom, 0 = weight, 1 = u, 2 = w)
    for (size_t k = 0; k < work.size(); ++k) {
      const Atom& a = work[k];
      cols.push_back(constraint_row(a));
      ref.push_back({static_cast<int>(k), 0});
      bool corner = (a.u == a.w) && (a.u == 0.0 || a.u == 1.0);
      if (corner) continue;
      double ju = kernels::j(std::clamp(a.u, kCoordFloor, 1.0 - kCoordFloor));
      double jw = kernels::j(std::clamp(a.w, kCoordFloor, 1.0 - kCoordFloor));
      cols.push_back({0.0, a.weight, 0.0, a.weight * ju, 0.0});
      ref.push_back({static_cast<int>(k), 1});
      cols.push_back({0.0, 0.0, a.weight, 0.0, a.weight * jw});
      ref.push_back({static_cast<int>(k), 2});
    }
    std::array<std::array<double, 5>, 5> gram{};
    for (int rr = 0; rr < 5; ++rr)
      for (int cc = 0; cc < 5; ++cc) {
        double acc = 0;
        for (const auto& col : cols) acc += col[rr] * col[cc];
        gram[rr][cc] = acc;
      }
    std::array<double, 5> lam;
    for (int rr = 0; rr < 5; ++rr) lam[rr] = -e[rr];
    if (!solve5(gram, lam)) break;
    for (size_t c = 0; c < cols.size(); ++c) {
      double delta = 0;
      for (int rr = 0; rr < 5; ++rr) delta += cols[c][rr] * lam[rr];
      auto [k, which] = ref[c];
      if (which == 0)
        work[k].weight = std::max(work[k].weight + delta, 0.0);
      else if (which == 1)
        work[k].u = std::clamp(work[k].u + delta, kCoordFloor, 1.0 - kCoordFloor);
      else
        work[k].w = std::clamp(work[k].w + delta, kCoordFloor, 1.0 - kCoordFloor);
    }
  }
  if (best < entry) atoms = best_atoms;
}

struct Post {
  std::vector<Atom> atoms;
  double value = 0;
  double residual = 0;
};

Post postprocess(const Decoded& d, const Query& q) {
  AtomList interior;
  for (int i = 0; i < kInterior; ++i) interior.add(d.p[2 + i], d.u[i], d.w[i]);
  std::vector<Atom> atoms = rearrange(interior.a);
  atoms.push_back({d.p[0], 0.0, 0.0});
  atoms.push_back({d.p[1], 1.0, 1.0});
  snap_and_merge(atoms);
  std::vector<Atom> live;
  for (const Atom& a : atoms)
    if (a.weight > 0) live.push_back(a);
  reduce_support(live);
  restore_feasibility(live, q);
  polish_weights(live, q);
  std::vector<Atom> kept;
  for (const Atom& a : live)
    if (a.weight > 1e-8) kept.push_back(a);
  if (kept.empty()) kept = live;

  Post out;
  out.atoms = kept;
  double val = 0;
  for (const Atom& a : kept) val += a.weight * pair_cost(a.u, a.w);
  out.value = val;
  out.residual = max_abs(moment_error(kept, q));
  return out;
}

std::vector<double> structured_start(const Query& q) {
  double mbar = std::clamp(0.5 * (q.mw + 1.0 - q.mu), 1e-9, 0.5 - 1e-9);
  double ebar = std::clamp(0.5 * (q.eu + q.ew), 1e-12, 1.0 - 1e-12);
  double ratio = 2.0 * ebar / (1.0 - 2.0 * mbar);
  double v = 1.0 - kernels::big_l_inv(ratio);
  double h = kernels::h2(std::clamp(v, 1e-12, 1.0 - 1e-12));
  double p2 = h > 0 ? std::clamp(ebar / h, 1e-6, 1.0 - 1e-6) : 0.5;
  double pc = 0.5 * (1.0 - p2);
  std::vector<double> th(kDim);
  th[0] = std::log(std::max(pc, 1e-12));
  th[1] = std::log(std::max(pc, 1e-12));
  for (int i = 0; i < kInterior; ++i) th[2 + i] = std::log(p2 / kInterior);
  for (int i = 0; i < kInterior; ++i) {
    th[kWeights + i] = logit(v);
    th[kWeights + kInterior + i] = logit(1.0 - v);
  }
  return th;
}

std::vector<double> moment_start(const Query& q) {
  double hu = std::max(kernels::h2(std::clamp(q.mu, 1e-12, 1.0 - 1e-12)), 1e-9);
  double hw = std::max(kernels::h2(std::clamp(q.mw, 1e-12, 1.0 - 1e-12)), 1e-9);
  double p2 = std::clamp(0.5 * (q.eu / hu + q.ew / hw), 0.05, 0.95);
  double pc = 0.5 * (1.0 - p2);
  double us = std::clamp((q.mu - pc) / p2, 1e-6, 1.0 - 1e-6);
  double ws = std::clamp((q.mw - pc) / p2, 1e-6, 1.0 - 1e-6);
  std::vector<double> th(kDim);
  th[0] = std::log(std::max(pc, 1e-12));
  th[1] = std::log(std::max(pc, 1e-12));
  for (int i = 0; i < kInterior; ++i) th[2 + i] = std::log(p2 / kInterior);
  for (int i = 0; i < kInterior; ++i) {
    th[kWeights + i] = logit(us);
    th[kWeights + kInterior + i] = logit(ws);
  }
  return th;
}

std::vector<double> random_start(const Query& q, Rng& g) {
  std::vector<double> th(kDim);
  for (int i = 0; i < kWeights; ++i) th[i] = g.normal();
  double lu = logit(std::clamp(q.mu, 1e-9, 1.0 - 1e-9));
  double lw = logit(std::clamp(q.mw, 1e-9, 1.0 - 1e-9));
  for (int i = 0; i < kInterior; ++i) {
    th[kWeights + i] = lu + 2.0 * g.normal();
    th[kWeights + kInterior + i] = lw + 2.0 * g.normal();
  }
  return th;
}

} // namespace

double pair_cost(double u, double w) {
  if (u == w) return 0.0;
  double cu = std::clamp(u, kCoordFloor, 1.0 - kCoordFloor);
  double cw = std::clamp(w, kCoordFloor, 1.0 - kCoordFloor);
  return 0.5 * (cu - cw) * (kernels::j(cw) - kernels::j(cu));
}

void require_query_feasible(const Query& q) {
  kernels::require_feasible_quadruple(q.mu, q.mw, q.eu, q.ew);
}

OracleResult oracle(const Query& q, int restarts, uint64_t seed) {
  require_query_feasible(q);
  if (restarts < 1) throw domain_error("oracle needs at least one restart");

  OracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.restarts_used = restarts;
  bool have = false;

  for (int r = 0; r < restarts; ++r) {
    std::vector<double> th;
    if (r == 0) {
      th = structured_start(q);
    } else if (r == 1) {
      th = moment_start(q);
    } else {
      Rng g = substream(seed, kSaltZetaOracle, static_cast<uint64_t>(r));
      th = random_start(q, g);
    }

    double mu_pen = 1e2;
    for (int stage = 0; stage < 8; ++stage, mu_pen *= 10.0) {
      auto f = [&](const std::vector<double>& x) {
        Decoded d = decode(x);
        auto res = residuals(d, q);
        double pen = 0;
        for (double e : res) pen += e * e;
        return objective(d) + mu_pen * pen;
      };
      auto nm = nelder_mead(f, th, stage == 0 ? 0.3 : 0.1, 1200);
      th = nm.x;
    }

    Post post = postprocess(decode(th), q);
    bool feas = post.residual <= kFeasTol;
    bool better;
    if (!have) {
      better = true;
    } else if (feas != best.feasible) {
      better = feas;
    } else {
      better = post.value < best.value;
    }
    if (better) {
      best.value = post.value;
      best.atoms = post.atoms;
      best.residual = post.residual;
      best.feasible = feas;
      have = true;
    }
  }
  std::sort(best.atoms.begin(), best.atoms.end(), [](const Atom& x, const Atom& y) {
    if (x.u != y.u) return x.u < y.u;
    return x.w < y.w;
  });
  return best;
}

} // namespace bf::zeta
