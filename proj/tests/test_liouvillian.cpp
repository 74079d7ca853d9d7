#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "maser/liouvillian.hpp"
#include "maser/steady_state.hpp"
#include "test_helpers.hpp"

using namespace maser;

TEST_CASE("rotating Hamiltonian layout") {
  // N = 1, omega1 = 1, omega2 = 3, Omega = 2, lambda = 0.1
  SystemParams p = SystemParams::homogeneous(1, 0.1, 0.05, 0.2, 0.5, 0.5);
  Matrix h = build_rotating_hamiltonian(p);
  CHECK(h(0, 0) == Complex(0.0));
  CHECK(h(1, 1) == Complex(2.0));
  CHECK(h(2, 2) == Complex(2.0));
  CHECK(h(1, 2) == Complex(0.1));
  CHECK(h(2, 1) == Complex(0.1));
  CHECK(h(0, 1) == Complex(0.0));
  CHECK(h(0, 2) == Complex(0.0));

  SUBCASE("drive off leaves a diagonal matrix") {
    p.drive_amps = {0.0};
    Matrix hd = build_rotating_hamiltonian(p);
    CHECK((hd - Matrix(hd.diagonal().asDiagonal())).norm() == 0.0);
  }

  SUBCASE("at resonance the driven block is a constant diagonal") {
    std::mt19937_64 gen(3);
    SystemParams q = test::random_params(4, gen);
    Matrix hq = build_rotating_hamiltonian(q);
    double expect = (q.omega1 + q.omega_deg) / 2.0;
    for (int j = 1; j < q.dim(); ++j)
      CHECK(hq(j, j).real() == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("dissipator acts as expected on simple states") {
  SystemParams p = SystemParams::homogeneous(1, 0.1, 0.05, 0.2, 0.5, 0.5);
  Superoperator d = build_dissipator(p);

  // cold channel drains |1><1| into |0><0| at rate 2 gamma_c (1+n_c)
  Matrix rho = Matrix::Zero(3, 3);
  rho(1, 1) = 1.0;
  Matrix out = maser::apply(d, rho);
  double cold_rate = 2.0 * p.gamma_c * (1.0 + p.n_c);
  CHECK(out(1, 1).real() == doctest::Approx(-cold_rate).epsilon(1e-14));
  CHECK(out(0, 0).real() == doctest::Approx(cold_rate).epsilon(1e-13));
  CHECK(std::abs(out.trace()) < 1e-14);

  // trace preservation on random Hermitian input
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix x = test::random_hermitian(3, gen);
    CHECK(std::abs(maser::apply(d, x).trace()) < 1e-12);
  }
}

TEST_CASE("superoperator invariants across random parameter sets") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 5; ++rep) {
    SystemParams p = test::random_params(1 + rep % 4, gen);
    Superoperator s = build_liouvillian(p);
    const int d = s.dim;

    // trace functional annihilates the generator from the left
    Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(d * d);
    for (int k = 0; k < d; ++k) tr(k * d + k) = 1.0;
    CHECK((tr * s.mat).cwiseAbs().maxCoeff() < 1e-12);

    // Hermiticity preservation and linearity
    for (int i = 0; i < 100; ++i) {
      Matrix x = test::random_hermitian(d, gen);
      Matrix lx = maser::apply(s, x);
      CHECK((lx - lx.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
    Matrix x1 = test::random_hermitian(d, gen), x2 = test::random_hermitian(d, gen);
    Matrix lin = maser::apply(s, 0.3 * x1 + 1.7 * x2) - 0.3 * maser::apply(s, x1) - 1.7 * maser::apply(s, x2);
    CHECK(lin.cwiseAbs().maxCoeff() < 1e-12);

    // spectrum in the closed left half plane, unique null eigenvalue
    Eigen::ComplexEigenSolver<Matrix> es(s.mat);
    int null_count = 0;
    double max_re = -1.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      max_re = std::max(max_re, es.eigenvalues()(i).real());
      if (std::abs(es.eigenvalues()(i)) < 1e-9) ++null_count;
    }
    CHECK(max_re <= 1e-9);
    CHECK(null_count == 1);
  }
}

TEST_CASE("pure decay steady state") {
  SystemParams p = SystemParams::homogeneous(2, 0.0, 0.05, 0.2, 0.0, 0.0);
  p.drive_amps = {0.0, 0.0};
  Superoperator s = build_liouvillian(p);
  DensityMatrix rho = solve_numeric(s);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 1.0;
  CHECK((rho.mat - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ground-state coherences die out under the evolution") {
  // rho_{01} and rho_{0j} decouple and decay; evolve a random state for long
  // time via the matrix exponential and check the block vanishes
  std::mt19937_64 gen(23);
  SystemParams p = test::default_params(0.2);
  Superoperator s = build_liouvillian(p);
  Matrix rho0 = test::random_density(p.dim(), gen);
  Matrix prop = (s.mat * 400.0).exp();
  Matrix rho = unvectorize(prop * vectorize(rho0), p.dim());
  for (int j = 1; j < p.dim(); ++j) CHECK(std::abs(rho(0, j)) < 1e-8);
}

TEST_CASE("apply checks dimensions") {
  SystemParams p = test::default_params();
  Superoperator s = build_liouvillian(p);
  Matrix wrong = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(maser::apply(s, wrong), std::invalid_argument);
}

TEST_CASE("size guard rejects oversized systems") {
  SystemParams p = test::default_params();
  p.n_deg = 300;
  p.drive_amps.assign(300, 0.1);
  CHECK_THROWS_AS(build_liouvillian(p), std::invalid_argument);
}
