#include "doctest.h"

#include <cmath>

#include "double_double.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "scalar_kernels.hpp"

using bf::Dd;
using bf::to_double;
namespace k = bf::kernels;

// Reference values computed independently with mpmath at 60 digits
// (tools/gen_reference_values.py).

TEST_CASE("entropy and slope kernels match high precision references") {
  CHECK(k::h2(0.11) == doctest::Approx(0.4999159581645280).epsilon(1e-14));
  CHECK(k::h2(0.25) == doctest::Approx(0.8112781244591329).epsilon(1e-14));
  CHECK(k::h2(0.3) == doctest::Approx(0.8812908992306926).epsilon(1e-14));
  CHECK(k::h2(0.45) == doctest::Approx(0.9927744539878083).epsilon(1e-14));
  CHECK(k::h2(0.0) == 0.0);
  CHECK(k::h2(1.0) == 0.0);
  CHECK(k::h2(0.5) == 1.0);

  CHECK(k::j(0.05) == doctest::Approx(4.247927513443585).epsilon(1e-14));
  CHECK(k::j(0.11) == doctest::Approx(3.0163018123291005).epsilon(1e-14));
  CHECK(k::j(0.3) == doctest::Approx(1.2223924213364479).epsilon(1e-14));
  CHECK(k::j(0.5) == 0.0);

  CHECK(k::d2(0.3, 0.5) == doctest::Approx(0.11870910076930738).epsilon(1e-14));
  CHECK(k::d2(0.11, 0.45) == doctest::Approx(0.39442624597698543).epsilon(1e-14));
  CHECK(k::d2(0.9, 0.2) == doctest::Approx(1.6529325012980811).epsilon(1e-14));

  CHECK(k::big_l(0.05) == doctest::Approx(0.6364376824799025).epsilon(1e-14));
  CHECK(k::big_l(0.2) == doctest::Approx(2.4064269829578745).epsilon(1e-14));
  CHECK(k::big_l(0.35) == doctest::Approx(6.22712036916994).epsilon(1e-14));
}

TEST_CASE("bisected inverses match references and invert cleanly") {
  CHECK(k::h2_inv(0.1) == doctest::Approx(0.012986862055517785).epsilon(2e-12));
  CHECK(k::h2_inv(0.25) == doctest::Approx(0.041692690273656696).epsilon(2e-12));
  CHECK(k::h2_inv(0.5) == doctest::Approx(0.11002786443835955).epsilon(2e-12));
  CHECK(k::h2_inv(0.75) == doctest::Approx(0.21450174485982875).epsilon(2e-12));
  CHECK(k::h2_inv(0.9) == doctest::Approx(0.31601934632360766).epsilon(2e-12));
  CHECK(k::h2_inv(0.0) == 0.0);
  CHECK(k::h2_inv(1.0) == 0.5);

  CHECK(k::big_l_inv(2.2) == doctest::Approx(0.18548562402290995).epsilon(2e-12));
  CHECK(k::big_l_inv(3.0) == doctest::Approx(0.23678332702683065).epsilon(2e-12));
  CHECK(k::big_l_inv(6.0) == doctest::Approx(0.34506885717562788).epsilon(2e-12));

  bf::Rng g{2024};
  for (int i = 0; i < 500; ++i) {
    double y = g.uniform(1e-4, 1.0 - 1e-4);
    double p = k::h2_inv(y);
    CHECK(p <= 0.5);
    CHECK(k::h2(p) == doctest::Approx(y).epsilon(1e-11));
    double x = g.uniform(0.05, 40.0);
    CHECK(k::big_l(k::big_l_inv(x)) == doctest::Approx(x).epsilon(1e-11));
  }
}

TEST_CASE("eta matches references in both precisions") {
  CHECK(k::eta(0.1) == doctest::Approx(6.085662114035649).epsilon(5e-12));
  CHECK(k::eta(0.25) == doctest::Approx(4.145501444577974).epsilon(5e-12));
  CHECK(k::eta(0.5) == doctest::Approx(2.352227091825977).epsilon(5e-12));
  CHECK(k::eta(0.75) == doctest::Approx(1.0692587356256555).epsilon(5e-12));
  CHECK(k::eta(0.9) == doctest::Approx(0.40988778941176776).epsilon(5e-12));
  CHECK(k::eta(1.0) == 0.0);

  Dd e = k::eta(Dd(0.5));
  Dd ref{2.3522270918259767, 2.1396426393318063e-16};
  CHECK(std::fabs(to_double(e - ref)) < 1e-26);
}

TEST_CASE("solve_r, phi, and the symmetric gap match references") {
  CHECK(k::solve_r(0.3, 0.4) == doctest::Approx(0.6589286782993979).epsilon(5e-12));
  CHECK(k::solve_r(0.2, 0.5) == doctest::Approx(0.593838842538359).epsilon(5e-12));
  CHECK(k::solve_r(0.45, 0.9) == doctest::Approx(0.9912321782849859).epsilon(5e-12));
  CHECK(k::solve_r(0.05, 0.2) == doctest::Approx(0.20769452893259793).epsilon(5e-12));
  CHECK(k::solve_r(0.5, 0.37) == 1.0);

  CHECK(k::phi(0.3, 0.4) == doctest::Approx(2.061517149699755).epsilon(5e-12));
  CHECK(k::phi(0.2, 0.5) == doctest::Approx(0.8071700801717977).epsilon(5e-12));
  CHECK(k::phi(0.45, 0.9) == doctest::Approx(0.3779795579166226).epsilon(5e-12));
  CHECK(k::phi(0.05, 0.2) == doctest::Approx(0.25296231995252594).epsilon(5e-12));
  CHECK(k::phi(0.5, 0.2) == doctest::Approx(4.651424112368163).epsilon(5e-12));
  CHECK(k::phi(0.5, 0.5) == doctest::Approx(2.352227091825977).epsilon(5e-12));
  CHECK(k::phi(0.5, 0.8) == doctest::Approx(0.8425910404166539).epsilon(5e-12));
  CHECK(k::phi(0.3, 0.9) == 0.0);   // h2(0.3) < 0.9
  CHECK(k::phi(0.0, 0.0) == 0.0);   // boundary x carries no gap

  CHECK(k::zeta_symmetric(0.3, 0.5) ==
        doctest::Approx(0.7776197327973452).epsilon(5e-12));
  CHECK(k::zeta_symmetric(0.25, 0.4) ==
        doctest::Approx(1.3211910247787547).epsilon(5e-12));
  CHECK(k::zeta_symmetric(0.45, 0.8) ==
        doctest::Approx(0.035852151116746262).epsilon(5e-11));
}

TEST_CASE("kappa matches references and keeps its symmetries") {
  CHECK(k::kappa(0.1, 0.3) == doctest::Approx(0.029154056958053223).epsilon(5e-11));
  CHECK(k::kappa(0.2, 0.45) == doctest::Approx(0.0098644721440082832).epsilon(5e-10));
  CHECK(k::kappa(0.35, 0.05) == doctest::Approx(0.11004533300775135).epsilon(5e-11));
  CHECK(k::kappa(0.7, 0.2) == doctest::Approx(0.0053451774768788227).epsilon(5e-10));

  CHECK(k::kappa(0.37, 0.37) == 0.0);
  CHECK(k::kappa(0.37, 0.37 + 1e-10) == 0.0);

  bf::Rng g{5150};
  for (int i = 0; i < 300; ++i) {
    double u = g.uniform(0.02, 0.98);
    double w = g.uniform(0.02, 0.98);
    if (std::fabs(u - w) < 1e-3) continue;
    double kv = k::kappa(u, w);
    CHECK(kv >= -1e-11);                                   // Jensen gap
    CHECK(k::kappa(w, u) == doctest::Approx(kv).epsilon(1e-12));
    CHECK(k::kappa(1.0 - u, 1.0 - w) == doctest::Approx(kv).scale(1.0).epsilon(5e-10));
  }

  // kappa(1-u, u) collapses: both terms reduce to (1-2u) j(u).
  for (double u : {0.1, 0.25, 0.4}) {
    CHECK(std::fabs(k::kappa(1.0 - u, u)) < 1e-10);
  }
}

TEST_CASE("four-moment lower bound agrees with its perspective form") {
  CHECK(k::zeta_lower_bound(0.3, 0.7, 0.5, 0.5) ==
        doctest::Approx(0.7776197327973452).epsilon(5e-12));
  CHECK(k::zeta_lower_bound(0.2, 0.6, 0.4, 0.7) ==
        doctest::Approx(0.7397210058662211).epsilon(5e-12));
  CHECK(k::zeta_lower_bound(0.4, 0.8, 0.6, 0.5) ==
        doctest::Approx(0.7248133590164521).epsilon(5e-12));

  // Identical to |mu-mw| J(Linv((eu+ew)/|mu-mw|)) + kappa(hu, hw); the two
  // expressions take different code paths through phi and Linv.
  bf::Rng g{777};
  int tried = 0;
  for (int i = 0; i < 2000 && tried < 300; ++i) {
    double mu_ = g.uniform(0.05, 0.95), mw = g.uniform(0.05, 0.95);
    double eu = g.uniform(0.05, 1.0) * k::h2(mu_);
    double ew = g.uniform(0.05, 1.0) * k::h2(mw);
    if (std::fabs(mu_ - mw) < 1e-2) continue;
    double hu = k::h2_inv(eu), hw = k::h2_inv(ew);
    if (std::fabs(hu - hw) < 1e-2) continue;
    ++tried;
    double direct = k::zeta_lower_bound(mu_, mw, eu, ew);
    double alt = std::fabs(mu_ - mw) *
                     k::j(k::big_l_inv((eu + ew) / std::fabs(mu_ - mw))) +
                 k::kappa(hu, hw);
    CHECK(direct == doctest::Approx(alt).scale(1.0).epsilon(1e-9));
  }
  CHECK(tried == 300);
}

TEST_CASE("midpoint gap margin is invariant under mean reflection") {
  // Dyadic means reflect exactly, so the normalized margins are bit-equal.
  double a = k::conjecture5_margin(0.25, 0.375, 0.5, 0.55);
  CHECK(a == k::conjecture5_margin(0.75, 0.375, 0.5, 0.55));
  CHECK(a == k::conjecture5_margin(0.25, 0.625, 0.5, 0.55));
  CHECK(a == k::conjecture5_margin(0.75, 0.625, 0.5, 0.55));
}

TEST_CASE("reflection and midpoint margins behave on their zero sets") {
  for (double u : {0.1, 0.25, 0.4}) {
    CHECK(std::fabs(k::c4_reflection_margin(u, u)) < 1e-10);
  }
  CHECK(k::c4_reflection_margin(0.5, 0.3) == 0.0);
  CHECK(k::c4_midpoint_margin(0.3, 0.44, 0.3, 0.44) == 0.0);
}

TEST_CASE("feasibility and domain guards throw the right errors") {
  CHECK_THROWS_AS(k::h2(-0.1), bf::domain_error);
  CHECK_THROWS_AS(k::h2(1.1), bf::domain_error);
  CHECK_THROWS_AS(k::h2_inv(1.2), bf::domain_error);
  CHECK_THROWS_AS(k::big_l(0.6), bf::domain_error);
  CHECK_THROWS_AS(k::phi(0.3, 0.0), bf::domain_error);
  CHECK_THROWS_AS(k::kappa(1.2, 0.3), bf::domain_error);
  CHECK_THROWS_AS(k::c4_reflection_margin(0.6, 0.3), bf::domain_error);
  CHECK_THROWS_AS(k::c4_midpoint_margin(0.0, 0.5, 0.5, 0.5), bf::domain_error);
  CHECK_THROWS_AS(k::zeta_lower_bound(0.1, 0.5, 0.9, 0.5), bf::infeasible_error);
  CHECK_THROWS_AS(k::conjecture5_margin(0.1, 0.5, 0.9, 0.5), bf::infeasible_error);
}

TEST_CASE("binary convolution and crossover basics") {
  CHECK(k::binary_conv(0.0, 0.25) == 0.25);
  CHECK(k::binary_conv(1.0, 0.25) == 0.75);
  CHECK(k::binary_conv(0.3, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k::crossover(0.0) == 0.0);
  CHECK(k::crossover(1e9) == doctest::Approx(0.5).epsilon(1e-15));
  // crossover is the unique fixed point free parametrization: conv stacks.
  double p1 = k::crossover(0.3), p2 = k::crossover(0.5);
  CHECK(k::binary_conv(p1, p2) == doctest::Approx(k::crossover(0.8)).epsilon(1e-14));
}

TEST_CASE("double-double path tracks the double path") {
  bf::Rng g{31337};
  for (int i = 0; i < 100; ++i) {
    double x = g.uniform(0.02, 0.98);
    double y = g.uniform(0.05, 0.95) * k::h2(x);
    double d = k::phi(x, y);
    double dd = to_double(k::phi(Dd(x), Dd(y)));
    CHECK(d == doctest::Approx(dd).scale(1.0).epsilon(1e-10));
  }
}
