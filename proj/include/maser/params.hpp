#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "maser/errors.hpp"

namespace maser {

enum class Regime { Engine, Refrigerator, Neutral };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Engine: return "Engine";
    case Regime::Refrigerator: return "Refrigerator";
    case Regime::Neutral: return "Neutral";
  }
  return "?";
}

// Physical parameters of the collectively driven (N+2)-level maser.
// Level layout: |0> ground, |1> first excited (energy omega1), |2>..|N+1>
// degenerate manifold (energy omega_deg). All energies and rates are in
// units of omega1, which defaults to 1.
struct SystemParams {
  int n_deg = 2;                          // N, number of degenerate upper levels
  double omega1 = 1.0;                    // first excited level energy (> 0)
  double omega_deg = 3.0;                 // degenerate manifold energy (> omega1)
  double drive_freq = 2.0;                // drive frequency Omega
  std::vector<double> drive_amps{0.1, 0.1};  // lambda_j, j = 2..N+1 (real, sign allowed)
  double gamma_h = 0.05;                  // hot bath coupling (> 0)
  double gamma_c = 0.2;                   // cold bath coupling (> 0)
  double n_h = 0.5;                       // hot bath occupation (>= 0)
  double n_c = 0.5;                       // cold bath occupation (>= 0)
  double detuning = 0.0;                  // (omega_deg - omega1) - drive_freq

  int dim() const { return n_deg + 2; }

  double lambda_eff() const {
    double s = 0.0;
    for (double a : drive_amps) s += a * a;
    return std::sqrt(s);
  }

  // All drive amplitudes equal and nonzero.
  bool homogeneous_drive() const {
    if (drive_amps.empty() || drive_amps[0] == 0.0) return false;
    for (double a : drive_amps)
      if (a != drive_amps[0]) return false;
    return true;
  }

  bool resonant(double tol = 1e-12) const { return std::abs(detuning) <= tol; }

  // Resonant parameter set with homogeneous drive amplitude `lambda`.
  static SystemParams homogeneous(int n, double lambda, double gamma_h, double gamma_c,
                                  double n_h, double n_c, double omega_deg = 3.0) {
    SystemParams p;
    p.n_deg = n;
    p.omega_deg = omega_deg;
    p.drive_freq = omega_deg - p.omega1;
    p.drive_amps.assign(static_cast<std::size_t>(n), lambda);
    p.gamma_h = gamma_h;
    p.gamma_c = gamma_c;
    p.n_h = n_h;
    p.n_c = n_c;
    p.detuning = 0.0;
    return p;
  }
};

inline std::vector<std::string> validate_params(const SystemParams& p) {
  std::vector<std::string> v;
  auto finite = [](double x) { return std::isfinite(x); };
  if (p.n_deg < 1) v.push_back("n_deg must be >= 1");
  if (p.n_deg > 256) v.push_back("n_deg exceeds the supported maximum of 256");
  if (!finite(p.omega1) || p.omega1 <= 0.0) v.push_back("omega1 must be positive");
  if (!finite(p.omega_deg) || !(p.omega_deg > p.omega1))
    v.push_back("omega_deg must exceed omega1");
  if (!finite(p.drive_freq)) v.push_back("drive_freq must be finite");
  if (!finite(p.gamma_h) || p.gamma_h <= 0.0) v.push_back("gamma_h must be positive");
  if (!finite(p.gamma_c) || p.gamma_c <= 0.0) v.push_back("gamma_c must be positive");
  if (!finite(p.n_h) || p.n_h < 0.0) v.push_back("n_h must be nonnegative");
  if (!finite(p.n_c) || p.n_c < 0.0) v.push_back("n_c must be nonnegative");
  if (static_cast<int>(p.drive_amps.size()) != p.n_deg)
    v.push_back("drive_amps must have exactly n_deg entries");
  for (double a : p.drive_amps)
    if (!finite(a)) {
      v.push_back("drive_amps entries must be finite");
      break;
    }
  if (finite(p.detuning) && finite(p.omega_deg) && finite(p.drive_freq)) {
    if (std::abs(p.detuning - ((p.omega_deg - p.omega1) - p.drive_freq)) > 1e-12)
      v.push_back("detuning is inconsistent with (omega_deg - omega1) - drive_freq");
  } else if (!finite(p.detuning)) {
    v.push_back("detuning must be finite");
  }
  return v;
}

inline void require_valid(const SystemParams& p) {
  auto v = validate_params(p);
  if (!v.empty()) {
    std::string msg = "invalid parameters:";
    for (const auto& s : v) msg += " [" + s + "]";
    throw std::invalid_argument(msg);
  }
}

// Bose-Einstein occupation 1/(exp(beta*omega) - 1).
inline double bose_occupation(double beta, double omega) {
  if (!(beta > 0.0) || !(omega > 0.0))
    throw std::domain_error("bose_occupation requires beta > 0 and omega > 0");
  return 1.0 / std::expm1(beta * omega);
}

inline Regime regime_classify(const SystemParams& p) {
  if (p.n_h > p.n_c) return Regime::Engine;
  if (p.n_h < p.n_c) return Regime::Refrigerator;
  return Regime::Neutral;
}

// k = gamma_h (1 + n_h) / lambda for a homogeneous drive.
inline double dissipation_to_driving_ratio(const SystemParams& p) {
  if (!p.homogeneous_drive())
    throw NotApplicableError(
        "dissipation_to_driving_ratio requires a homogeneous nonzero drive");
  return p.gamma_h * (1.0 + p.n_h) / p.drive_amps[0];
}

}  // namespace maser
