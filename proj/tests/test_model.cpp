#include <doctest.h>

#include "maser/params.hpp"
#include "test_helpers.hpp"

using namespace maser;

TEST_CASE("validate_params accepts the default working point") {
  CHECK(validate_params(test::default_params()).empty());
}

TEST_CASE("validate_params flags each violated invariant by name") {
  SystemParams p = test::default_params();
  p.gamma_h = 0.0;
  auto v = validate_params(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("gamma_h") != std::string::npos);

  p = test::default_params();
  p.drive_amps = {0.1, 0.1, 0.1};  // three amplitudes, n_deg = 2
  v = validate_params(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("drive_amps") != std::string::npos);

  p = test::default_params();
  p.omega_deg = 0.5;  // below omega1
  p.detuning = (p.omega_deg - p.omega1) - p.drive_freq;
  CHECK(validate_params(p).size() == 1);

  p = test::default_params();
  p.n_c = -0.1;
  CHECK(validate_params(p).size() == 1);

  p = test::default_params();
  p.detuning = 0.5;  // inconsistent with the frequencies
  CHECK(validate_params(p).size() == 1);
}

TEST_CASE("bose_occupation") {
  CHECK(bose_occupation(std::log(2.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bose_occupation(std::log(3.0), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bose_occupation(10.0, 1.0) == doctest::Approx(4.5401991009687765e-05).epsilon(1e-14));
  CHECK_THROWS_AS(bose_occupation(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bose_occupation(1.0, 0.0), std::domain_error);

  // strictly decreasing in beta*omega, divergent toward zero
  double prev = bose_occupation(1e-8, 1.0);
  CHECK(prev > 1e6);
  for (double x = 0.1; x < 20.0; x += 0.1) {
    double cur = bose_occupation(x, 1.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("regime_classify") {
  CHECK(regime_classify(test::default_params(50.0)) == Regime::Engine);
  CHECK(regime_classify(test::default_params(0.5)) == Regime::Neutral);
  CHECK(regime_classify(test::default_params(0.2)) == Regime::Refrigerator);
}

TEST_CASE("regime_classify is invariant under a common rescaling of energies and rates") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    SystemParams p = test::random_params(3, gen);
    for (double scale : {0.25, 4.0, 100.0}) {
      SystemParams q = p;
      q.omega1 *= scale;
      q.omega_deg *= scale;
      q.drive_freq *= scale;
      q.detuning *= scale;
      q.gamma_h *= scale;
      q.gamma_c *= scale;
      for (double& a : q.drive_amps) a *= scale;
      CHECK(validate_params(q).empty());
      CHECK(regime_classify(q) == regime_classify(p));
    }
  }
}

TEST_CASE("dissipation_to_driving_ratio") {
  SystemParams p = SystemParams::homogeneous(2, 0.1, 0.05, 0.2, 5.0, 0.5);
  CHECK(dissipation_to_driving_ratio(p) == doctest::Approx(3.0).epsilon(1e-14));

  p = SystemParams::homogeneous(2, 0.05, 0.05, 0.2, 0.0, 0.5);
  CHECK(dissipation_to_driving_ratio(p) == doctest::Approx(1.0).epsilon(1e-14));

  p = test::default_params();
  p.drive_amps = {0.1, 0.2};
  CHECK_THROWS_AS(dissipation_to_driving_ratio(p), NotApplicableError);
  p.drive_amps = {0.0, 0.0};
  CHECK_THROWS_AS(dissipation_to_driving_ratio(p), NotApplicableError);
}

TEST_CASE("lambda_eff and homogeneity helpers") {
  SystemParams p = test::default_params();
  CHECK(p.lambda_eff() == doctest::Approx(std::sqrt(0.02)).epsilon(1e-14));
  CHECK(p.homogeneous_drive());
  p.drive_amps = {0.1, -0.1};
  CHECK(!p.homogeneous_drive());
  p.drive_amps = {0.0, 0.0};
  CHECK(p.lambda_eff() == 0.0);
  CHECK(!p.homogeneous_drive());
}
