#include <doctest.h>

#include "maser/steady_state.hpp"
#include "test_helpers.hpp"

using namespace maser;

TEST_CASE("coeff_F") {
  SystemParams p = SystemParams::homogeneous(2, 0.1, 0.05, 0.2, 0.25, 0.5);
  AnalyticCoefficients c = coeff_F(p);
  CHECK(c.a == doctest::Approx(9.0625e-4).epsilon(1e-13));
  CHECK(c.a > 0.0);
  CHECK(c.b > 0.0);
  CHECK(c.c > 0.0);
  CHECK(c.f_value == doctest::Approx(c.a * 4.0 + c.b * 2.0 + c.c).epsilon(1e-15));

  SUBCASE("F grows monotonically in N for positive coefficients") {
    double prev = 0.0;
    for (int n = 1; n <= 12; ++n) {
      SystemParams q = SystemParams::homogeneous(n, 0.1, 0.05, 0.2, 0.25, 0.5);
      double f = coeff_F(q).f_value;
      CHECK(f > prev);
      prev = f;
    }
  }

  SUBCASE("preconditions") {
    SystemParams q = p;
    q.drive_amps = {0.1, 0.2};
    CHECK_THROWS_AS(coeff_F(q), NotApplicableError);
    q = p;
    q.drive_freq = 1.5;
    q.detuning = 0.5;
    CHECK_THROWS_AS(coeff_F(q), NotApplicableError);
  }
}

TEST_CASE("solve_numeric basics") {
  SUBCASE("pure decay gives the ground state") {
    SystemParams p = SystemParams::homogeneous(2, 0.0, 0.05, 0.2, 0.0, 0.0);
    p.drive_amps = {0.0, 0.0};
    DensityMatrix rho = solve_numeric(build_liouvillian(p));
    CHECK(std::abs(rho.mat(0, 0) - 1.0) < 1e-12);
    CHECK(rho.mat.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-11));
  }

  SUBCASE("no drive: steady state is diagonal") {
    SystemParams p = test::default_params(2.0);
    p.drive_amps = {0.0, 0.0};
    DensityMatrix rho = solve_numeric(build_liouvillian(p));
    for (int n = 0; n < rho.dim(); ++n)
      for (int m = n + 1; m < rho.dim(); ++m) CHECK(std::abs(rho.mat(n, m)) < 1e-12);
  }

  SUBCASE("degenerate generator is rejected") {
    Superoperator zero{2, Matrix::Zero(4, 4)};
    CHECK_THROWS_AS(solve_numeric(zero), NonUniqueSteadyStateError);
  }
}

TEST_CASE("analytic and numeric steady states agree") {
  std::mt19937_64 gen(31);
  for (int n = 1; n <= 6; ++n) {
    SystemParams p = test::random_params(n, gen);
    Superoperator s = build_liouvillian(p);
    DensityMatrix a = solve_analytic(p);
    DensityMatrix b = solve_numeric(s);
    CHECK((a.mat - b.mat).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(residual(s, a) < 1e-10);
    CHECK(residual(s, b) < 1e-10);
  }
}

TEST_CASE("nullspace oracle agrees with the constrained solve") {
  std::mt19937_64 gen(37);
  for (int rep = 0; rep < 3; ++rep) {
    SystemParams p = test::random_params(1 + rep, gen);
    Superoperator s = build_liouvillian(p);
    CHECK((solve_numeric_eig(s).mat - solve_numeric(s).mat).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("steady-state structure in the homogeneous case") {
  std::mt19937_64 gen(41);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + rep % 4;
    SystemParams p = test::random_params(n, gen);
    if (p.n_h == p.n_c) continue;
    DensityMatrix rho = solve_analytic(p);
    const int d = p.dim();
    const double sign = p.n_c > p.n_h ? 1.0 : -1.0;

    for (int j = 1; j < d; ++j) CHECK(std::abs(rho.mat(0, j)) == 0.0);
    Complex r12 = rho.mat(1, 2);
    CHECK(std::abs(r12.real()) < 1e-15);
    CHECK(sign * r12.imag() > 0.0);
    for (int j = 2; j < d; ++j) {
      CHECK(std::abs(rho.mat(1, j) - r12) == 0.0);  // all rho_{1k} equal
      CHECK(rho.mat(j, j) == rho.mat(2, 2));        // equal manifold populations
      for (int l = 2; l < d; ++l)
        if (l != j) {
          CHECK(std::abs(rho.mat(j, l).imag()) == 0.0);
          CHECK(sign * rho.mat(j, l).real() > 0.0);
          // k-ratio identity |rho_1j| / |rho_jl| = gamma_h (1+n_h) / lambda
          CHECK(std::abs(rho.mat(1, j)) / std::abs(rho.mat(j, l)) ==
                doctest::Approx(dissipation_to_driving_ratio(p)).epsilon(1e-12));
        }
    }
  }
}

TEST_CASE("coherences vanish at the regime boundary") {
  SystemParams p = test::default_params(0.5);  // n_h = n_c
  DensityMatrix rho = solve_analytic(p);
  for (int n = 0; n < rho.dim(); ++n)
    for (int m = n + 1; m < rho.dim(); ++m) CHECK(std::abs(rho.mat(n, m)) == 0.0);
}

TEST_CASE("flipping one drive amplitude flips the degenerate coherences") {
  std::mt19937_64 gen(43);
  for (int n : {2, 3}) {
    SystemParams p = test::random_params(n, gen);
    DensityMatrix base = solve_numeric(build_liouvillian(p));
    SystemParams q = p;
    q.drive_amps.back() = -q.drive_amps.back();
    DensityMatrix flip = solve_numeric(build_liouvillian(q));
    const int d = p.dim(), last = d - 1;
    for (int l = 2; l < last; ++l) {
      CHECK(std::abs(flip.mat(last, l) + base.mat(last, l)) < 1e-11);
    }
    for (int nn = 0; nn < d; ++nn)
      for (int mm = nn + 1; mm < d; ++mm)
        CHECK(std::abs(std::abs(flip.mat(nn, mm)) - std::abs(base.mat(nn, mm))) < 1e-11);
  }
}

TEST_CASE("residual") {
  SystemParams p = test::default_params(0.25);
  Superoperator s = build_liouvillian(p);
  DensityMatrix rho = solve_numeric(s);
  CHECK(residual(s, rho) <= 1e-10);

  Matrix mixed = Matrix::Identity(p.dim(), p.dim()) / static_cast<double>(p.dim());
  CHECK(residual(s, mixed) > 1e-3);

  // absolute homogeneity in the argument
  CHECK(residual(s, Matrix(3.0 * mixed)) == doctest::Approx(3.0 * residual(s, mixed)).epsilon(1e-12));

  Matrix wrong = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(residual(s, wrong), std::invalid_argument);
}
