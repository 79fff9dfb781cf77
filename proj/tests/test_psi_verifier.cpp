#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "candidates.hpp"
#include "double_double.hpp"
#include "margins.hpp"
#include "rng.hpp"

namespace ps = bf::psi;

namespace {

// weights / u / w, one line each, '#' comments allowed
ps::Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double x;
    while (ls >> x) row.push_back(x);
    if (!row.empty()) rows.push_back(row);
  }
  REQUIRE(rows.size() == 3);
  return ps::Instance{rows[0], rows[1], rows[2]};
}

const std::string kDataDir = BOOLFLOW_DATA_DIR;

} // namespace

TEST_CASE("builtin candidates evaluate their closed forms") {
  ps::Candidate phi = ps::open_candidate("phi");
  CHECK(phi.family == ps::Family::entropy);
  CHECK(phi.name == "phi");
  CHECK(phi.eval(0.3, 0.4) == bf::kernels::phi(0.3, 0.4));
  CHECK(phi.eval(0.5, 0.2) == bf::kernels::phi(0.5, 0.2));
  CHECK(phi.eval(0.3, 0.9) == 0.0);

  ps::Candidate eg = ps::open_candidate("eta-guess");
  CHECK(eg.eval(0.5, 0.5) == doctest::Approx(2.352227091825977).epsilon(1e-13));
  CHECK(eg.eval(0.5, 1.0) == 0.0);            // argument clamps at 1
  CHECK(eg.eval(0.11, 0.5) == 0.0);           // h2(0.11) < 0.5 already
  CHECK_THROWS_AS(eg.eval(0.5, 0.0), bf::domain_error);

  ps::Candidate z = ps::open_candidate("zero");
  CHECK(z.eval(0.3, 0.1) == 0.0);

  ps::Candidate hn = ps::open_candidate("hellinger-natural");
  CHECK(hn.family == ps::Family::hellinger);
  CHECK(hn.eval(0.0, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(hn.eval(0.6, 0.8) == 0.0);            // exactly on the zero boundary
  CHECK(hn.eval(0.8, 0.9) == 0.0);
  CHECK_THROWS_AS(hn.eval(1.5, 0.5), bf::domain_error);

  CHECK(ps::open_candidate("hellinger-zero").eval(0.2, 0.3) == 0.0);
  CHECK_THROWS_AS(ps::open_candidate("no-such-candidate-file"), bf::io_error);
}

TEST_CASE("grid candidates interpolate, fold, and vanish where required") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path();

  // f(a, b) = a + b is reproduced exactly by bilinear interpolation.
  fs::path ent = dir / "bf_test_grid_entropy.txt";
  {
    std::ofstream out(ent);
    out << "# plane a + b on a 3x3 lattice\n";
    out << "family entropy\n";
    out << "a 0 1 3\n";
    out << "b 0 1 3\n";
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out << 0.5 * i + 0.5 * j << "\n";
  }
  ps::Candidate g = ps::load_grid(ent.string());
  CHECK(g.family == ps::Family::entropy);
  CHECK(g.na == 3);
  CHECK(g.nb == 3);
  CHECK(g.eval(0.25, 0.125) == 0.375);
  CHECK(g.eval(0.75, 0.125) == 0.375);  // folded onto a = 0.25
  CHECK(g.eval(0.5, 1.0) == 0.0);       // h2(0.5) <= 1: forced zero region
  CHECK(g.eval(0.11, 0.75) == 0.0);     // h2(0.11) < 0.75

  fs::path hel = dir / "bf_test_grid_hellinger.txt";
  {
    std::ofstream out(hel);
    out << "family hellinger\n";
    out << "a -1 1 2\n";
    out << "b 0 1 2\n";
    out << "1 1 1 1\n";
  }
  ps::Candidate h = ps::load_grid(hel.string());
  CHECK(h.eval(0.3, 0.5) == 1.0);
  CHECK(h.eval(-0.3, 0.5) == 1.0);      // even in a
  CHECK(h.eval(0.6, 0.9) == 0.0);       // sqrt(1 - a^2) <= b

  fs::path bad = dir / "bf_test_grid_bad.txt";
  auto rewrite = [&](const std::string& text) {
    std::ofstream out(bad);
    out << text;
  };
  rewrite("family entropy\na 0 1 3\nb 0 1 3\n1 2 3\n");
  CHECK_THROWS_AS(ps::load_grid(bad.string()), bf::io_error);  // 3 of 9 values
  rewrite("family sobolev\na 0 1 3\nb 0 1 3\n");
  CHECK_THROWS_AS(ps::load_grid(bad.string()), bf::io_error);
  rewrite("family entropy\na 1 0 3\nb 0 1 3\n");
  CHECK_THROWS_AS(ps::load_grid(bad.string()), bf::io_error);  // decreasing range
  rewrite("family entropy\na 0 2 3\nb 0 1 3\n");
  CHECK_THROWS_AS(ps::load_grid(bad.string()), bf::io_error);  // a beyond domain
  rewrite("family entropy\na 0 1 3\nb 0 1 3\n1 1 1 1 -2 1 1 1 1\n");
  CHECK_THROWS_AS(ps::load_grid(bad.string()), bf::io_error);  // negative value

  fs::remove(ent);
  fs::remove(hel);
  fs::remove(bad);
}

TEST_CASE("instance validation rejects malformed mixtures") {
  ps::Candidate phi = ps::open_candidate("phi");
  CHECK_THROWS_AS(ps::psi_margin<double>(phi, ps::Instance{{}, {}, {}}),
                  bf::domain_error);
  CHECK_THROWS_AS(ps::psi_margin<double>(phi, ps::Instance{{1.0}, {0.3, 0.4}, {0.2}}),
                  bf::domain_error);
  CHECK_THROWS_AS(
      ps::psi_margin<double>(phi, ps::Instance{{-0.5, 1.5}, {0.3, 0.4}, {0.2, 0.6}}),
      bf::domain_error);
  CHECK_THROWS_AS(
      ps::psi_margin<double>(phi, ps::Instance{{0.2, 0.2}, {0.3, 0.4}, {0.2, 0.6}}),
      bf::domain_error);
  CHECK_THROWS_AS(ps::psi_margin<double>(phi, ps::Instance{{1.0}, {0.0}, {0.5}}),
                  bf::domain_error);

  ps::Candidate hn = ps::open_candidate("hellinger-natural");
  CHECK_THROWS_AS(ps::psi_h_margin<double>(hn, ps::Instance{{1.0}, {1.0}, {0.2}}),
                  bf::domain_error);

  // family mismatch both ways
  ps::Instance ok{{1.0}, {0.3}, {0.6}};
  CHECK_THROWS_AS(ps::psi_margin<double>(hn, ok), bf::domain_error);
  CHECK_THROWS_AS(ps::psi_h_margin<double>(phi, ok), bf::domain_error);
}

TEST_CASE("degenerate instances sit exactly on the boundary") {
  ps::Candidate phi = ps::open_candidate("phi");
  // u == w collapses both the dissipation and the Jensen gap.
  CHECK(ps::psi_margin<double>(phi, ps::Instance{{1.0}, {0.3}, {0.3}}) == 0.0);
  ps::Candidate hz = ps::open_candidate("hellinger-zero");
  CHECK(ps::psi_h_margin<double>(hz, ps::Instance{{1.0}, {0.4}, {0.4}}) == 0.0);
}

TEST_CASE("zero candidate margin is the raw dissipation, never negative") {
  ps::Candidate z = ps::open_candidate("zero");
  bf::Rng g{41};
  for (int trial = 0; trial < 200; ++trial) {
    size_t k = 1 + g.next() % 3;
    ps::Instance inst;
    double tot = 0;
    for (size_t i = 0; i < k; ++i) {
      double p = g.uniform(0.1, 1.0);
      inst.weights.push_back(p);
      tot += p;
      inst.u.push_back(g.uniform(0.01, 0.99));
      inst.w.push_back(g.uniform(0.01, 0.99));
    }
    for (double& p : inst.weights) p /= tot;
    CHECK(ps::psi_margin<double>(z, inst) >= 0.0);
  }
}

TEST_CASE("phi margin stays nonnegative on random mixtures") {
  ps::Candidate phi = ps::open_candidate("phi");
  bf::Rng g{42};
  for (int trial = 0; trial < 200; ++trial) {
    size_t k = 1 + g.next() % 3;
    ps::Instance inst;
    double tot = 0;
    for (size_t i = 0; i < k; ++i) {
      double p = g.uniform(0.1, 1.0);
      inst.weights.push_back(p);
      tot += p;
      inst.u.push_back(g.uniform(0.02, 0.98));
      inst.w.push_back(g.uniform(0.02, 0.98));
    }
    for (double& p : inst.weights) p /= tot;
    CHECK(ps::psi_margin<double>(phi, inst) >= -1e-10);
  }
}

TEST_CASE("frozen counterexample breaks the one-line entropy guess") {
  ps::Instance inst = read_instance(kDataDir + "/counterexamples/eta_guess_violation.txt");
  REQUIRE(inst.size() == 3);
  CHECK(inst.weights[0] == 0.1);
  CHECK(inst.u[1] == 0.9999);
  CHECK(inst.w[0] == 0.01);

  ps::Candidate eg = ps::open_candidate("eta-guess");
  double m = ps::psi_margin<double>(eg, inst);
  CHECK(m == doctest::Approx(-0.27763628480332937).epsilon(1e-11));
  CHECK(m < 0.0);

  bf::Dd md = ps::psi_margin<bf::Dd>(eg, inst);
  CHECK(std::fabs(bf::to_double(md) - (-0.27763628480332937)) < 1e-15);

  // phi survives the same instance
  CHECK(ps::psi_margin<double>(ps::open_candidate("phi"), inst) >= 0.0);
}

TEST_CASE("frozen counterexample breaks the natural hellinger surface") {
  ps::Instance inst =
      read_instance(kDataDir + "/counterexamples/hellinger_natural_violation.txt");
  REQUIRE(inst.size() == 3);

  ps::Candidate hn = ps::open_candidate("hellinger-natural");
  double m = ps::psi_h_margin<double>(hn, inst);
  CHECK(m == doctest::Approx(-0.017439931939050593).epsilon(1e-10));
  CHECK(m < 0.0);

  bf::Dd md = ps::psi_h_margin<bf::Dd>(hn, inst);
  CHECK(std::fabs(bf::to_double(md) - (-0.017439931939050593)) < 1e-14);

  // the zero surface trivially survives (margin is the dissipation)
  CHECK(ps::psi_h_margin<double>(ps::open_candidate("hellinger-zero"), inst) >= 0.0);
}

TEST_CASE("two point dissipation identity holds to rounding") {
  bf::Rng g{43};
  for (int trial = 0; trial < 2000; ++trial) {
    double u = g.uniform(-0.99, 0.99);
    double w = g.uniform(-0.99, 0.99);
    double lhs = 0, rhs = 0;
    ps::two_point_sides(u, w, &lhs, &rhs);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(lhs)));
    CHECK(lhs >= -1e-15);
  }
  double lhs = 0, rhs = 0;
  CHECK_THROWS_AS(ps::two_point_sides(1.0, 0.3, &lhs, &rhs), bf::domain_error);
}

TEST_CASE("quadratic surrogate basics") {
  CHECK(ps::psi_hat_h_value(0.3, 0.5, 0.3, 0.5) == 0.0);
  CHECK(ps::psi_hat_h_value(0.1, 0.4, 0.5, 0.8) ==
        ps::psi_hat_h_value(0.5, 0.8, 0.1, 0.4));
  CHECK(ps::psi_hat_h_value(0.0, 1.0, 0.5, 0.5) ==
        doctest::Approx((0.0625 + 0.0625) * 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ps::psi_hat_h_value(0.1, 0.0, 0.2, 0.5), bf::domain_error);
}

TEST_CASE("averaged surrogate margin vanishes on single atoms") {
  // One atom makes the surrogate equal the two-point dissipation identically.
  bf::Rng g{44};
  for (int trial = 0; trial < 300; ++trial) {
    double u = g.uniform(-0.99, 0.99);
    double w = g.uniform(-0.99, 0.99);
    double m = ps::averaged_h_margin<double>(ps::Instance{{1.0}, {u}, {w}});
    CHECK(std::fabs(m) <= 1e-12);
  }
}

TEST_CASE("averaged surrogate margin is nonnegative on mixtures") {
  bf::Rng g{45};
  for (int trial = 0; trial < 300; ++trial) {
    size_t k = 2 + g.next() % 3;
    ps::Instance inst;
    double tot = 0;
    for (size_t i = 0; i < k; ++i) {
      double p = g.uniform(0.1, 1.0);
      inst.weights.push_back(p);
      tot += p;
      inst.u.push_back(g.uniform(-0.99, 0.99));
      inst.w.push_back(g.uniform(-0.99, 0.99));
    }
    for (double& p : inst.weights) p /= tot;
    CHECK(ps::averaged_h_margin<double>(inst) >= -1e-9);
  }
}
