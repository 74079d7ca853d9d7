#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "maser/experiments.hpp"
#include "maser/steady_state.hpp"
#include "maser/sync.hpp"

namespace maser {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string to_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}


inline Matrix random_density(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(gen), g(gen));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

inline SystemParams random_homogeneous_params(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return SystemParams::homogeneous(n, 0.02 + 0.28 * u(gen), 0.02 + 0.38 * u(gen),
                                   0.02 + 0.38 * u(gen), 0.05 + 3.95 * u(gen),
                                   0.05 + 3.95 * u(gen));
}

}  // namespace detail

// Cross-check suite run by the CLI `validate` subcommand: every check pits an
// implementation path against an independent one.
inline std::vector<CheckResult> run_validation_suite(std::uint64_t seed = 2024) {
  std::vector<CheckResult> out;
  std::mt19937_64 gen(seed);

  {
    CheckResult c{"steady-state: analytic vs numeric (random homogeneous params)", true, ""};
    double worst = 0.0;
    for (int n = 1; n <= 5 && c.pass; ++n)
      for (int rep = 0; rep < 4; ++rep) {
        SystemParams p = detail::random_homogeneous_params(n, gen);
        auto s = build_liouvillian(p);
        double diff = (solve_analytic(p).mat - solve_numeric(s).mat).cwiseAbs().maxCoeff();
        worst = std::max(worst, diff);
      }
    c.pass = worst < 1e-10;
    c.detail = "max entrywise difference " + detail::to_sci(worst);
    out.push_back(c);
  }

  {
    CheckResult c{"sync: closed form vs optimizer (N = 2 across branches)", true, ""};
    double worst = 0.0;
    for (double k : {0.5, 1.0, 1.5, 2.5, 3.0}) {
      SystemParams p = SystemParams::homogeneous(2, 0.05 * (1.0 + 5.0) / k, 0.05, 0.2, 5.0, 0.5);
      SyncResult closed = closed_form_smax_n2(p);
      SyncResult numeric = maximize_sync(solve_analytic(p), 32);
      worst = std::max(worst, std::abs(closed.s_max - numeric.s_max));
    }
    for (double nh : {0.05, 0.2, 0.4}) {
      SystemParams p = SystemParams::homogeneous(2, 0.1, 0.05, 0.2, nh, 0.5);
      worst = std::max(worst,
                       std::abs(closed_form_smax_n2(p).s_max -
                                maximize_sync(solve_analytic(p), 32).s_max));
    }
    c.pass = worst < 1e-8;
    c.detail = "max |closed - numeric| " + detail::to_sci(worst);
    out.push_back(c);
  }

  {
    CheckResult c{"husimi: quadrature marginal vs phase distribution", true, ""};
    double worst = 0.0;
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (int d : {2, 3, 4})
      for (int rep = 0; rep < 4; ++rep) {
        Matrix rho = detail::random_density(d, gen);
        PhaseVector pv;
        for (int i = 0; i < d - 1; ++i) pv.phases.push_back(u(gen));
        worst = std::max(worst, std::abs(marginalize_husimi_numeric(rho, pv, 64) -
                                         phase_distribution(rho, pv)));
      }
    c.pass = worst < 1e-6;
    c.detail = "max |quadrature - closed form| " + detail::to_sci(worst);
    out.push_back(c);
  }

  {
    CheckResult c{"theorem: D = 3 diagonality witnesses", true, ""};
    for (int rep = 0; rep < 50 && c.pass; ++rep) {
      Matrix rho = detail::random_density(3, gen);
      auto chk = diagonality_sync_check_d3(rho);
      if (!chk.consistent) {
        c.pass = false;
        c.detail = "witness failed on a random nondiagonal state";
      }
    }
    for (int rep = 0; rep < 50 && c.pass; ++rep) {
      Matrix rho = detail::random_density(3, gen);
      rho = rho.diagonal().asDiagonal();
      auto chk = diagonality_sync_check_d3(rho);
      if (!chk.consistent) {
        c.pass = false;
        c.detail = "diagonal state not certified";
      }
    }
    if (c.pass) c.detail = "all witnesses positive, all diagonal states certified";
    out.push_back(c);
  }

  return out;
}

}  // namespace maser
