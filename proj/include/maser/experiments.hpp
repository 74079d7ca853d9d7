#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "maser/parallel.hpp"
#include "maser/rng.hpp"
#include "maser/sync.hpp"

namespace maser {

struct SweepSpec {
  SystemParams base_params;
  std::string axis;            // e.g. "n_h/n_c" or "lambda2/lambda3"
  std::vector<double> values;  // nonempty, finite
  std::uint64_t seed = 1;
  int starts = 64;
  int threads = 0;  // 0 = hardware concurrency
};

inline void validate_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep values must be nonempty");
  for (double v : spec.values)
    if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
}

struct BathSweepRow {
  double ratio = 0.0;  // n_h / n_c
  double n_h = 0.0;
  double s_max_numeric = 0.0;
  double s_max_closed = 0.0;
  double entrainment = 0.0;  // (|rho_12|+|rho_13|)/(16 pi^2) at N = 2
  SyncBranch branch = SyncBranch::NumericOnly;
  bool ok = false;
  std::string error;
};

// Sweep of the bath-occupation ratio n_h / n_c at fixed n_c.
inline std::vector<BathSweepRow> sweep_bath_ratio(const SweepSpec& spec) {
  validate_sweep(spec);
  std::vector<BathSweepRow> rows(spec.values.size());
  parallel_for(static_cast<int>(spec.values.size()), [&](int i) {
    BathSweepRow& row = rows[static_cast<std::size_t>(i)];
    row.ratio = spec.values[static_cast<std::size_t>(i)];
    SystemParams p = spec.base_params;
    p.n_h = row.ratio * p.n_c;
    row.n_h = p.n_h;
    try {
      require_valid(p);
      DensityMatrix rho = solve_numeric(build_liouvillian(p));
      SyncResult numeric = maximize_sync(rho, spec.starts, 1e-12,
                                         derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
      row.s_max_numeric = numeric.s_max;
      row.entrainment = numeric.entrainment_contribution;
      if (p.n_deg == 2 && p.homogeneous_drive() && p.resonant()) {
        SyncResult closed = closed_form_smax_n2(p);
        row.s_max_closed = closed.s_max;
        row.branch = closed.branch;
      } else {
        row.s_max_closed = std::numeric_limits<double>::quiet_NaN();
        row.branch = numeric.branch;
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }, spec.threads);
  return rows;
}

struct DriveSweepRow {
  double ratio = 0.0;  // |lambda_2 / lambda_3| in (0, 1], lambda_2 fixed
  double s_max_engine = 0.0;
  double entrainment_engine = 0.0;
  double s_max_refrigerator = 0.0;
  double entrainment_refrigerator = 0.0;
  bool ok = false;
  std::string error;
};

// Sweep of the drive inhomogeneity at N = 2, in both regimes.
// No closed form applies off the homogeneous point; everything is numeric.
inline std::vector<DriveSweepRow> sweep_drive_ratio(const SweepSpec& spec, double n_h_engine,
                                                    double n_h_refrigerator) {
  validate_sweep(spec);
  if (spec.base_params.n_deg != 2)
    throw std::invalid_argument("sweep_drive_ratio requires N = 2");
  std::vector<DriveSweepRow> rows(spec.values.size());
  parallel_for(static_cast<int>(spec.values.size()), [&](int i) {
    DriveSweepRow& row = rows[static_cast<std::size_t>(i)];
    row.ratio = spec.values[static_cast<std::size_t>(i)];
    try {
      if (!(row.ratio > 0.0 && row.ratio <= 1.0))
        throw std::invalid_argument("drive ratio must lie in (0, 1]");
      const double lam2 = spec.base_params.drive_amps.at(0);
      auto run = [&](double n_h, double& s_max, double& ent, std::uint64_t salt) {
        SystemParams p = spec.base_params;
        p.n_h = n_h;
        p.drive_amps = {lam2, lam2 / row.ratio};
        require_valid(p);
        DensityMatrix rho = solve_numeric(build_liouvillian(p));
        SyncResult r = maximize_sync(rho, spec.starts, 1e-12,
                                     derive_seed(spec.seed, static_cast<std::uint64_t>(i), salt));
        s_max = r.s_max;
        ent = r.entrainment_contribution;
      };
      run(n_h_engine, row.s_max_engine, row.entrainment_engine, 0);
      run(n_h_refrigerator, row.s_max_refrigerator, row.entrainment_refrigerator, 1);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }, spec.threads);
  return rows;
}

struct PowerLawFit {
  double alpha = 0.0;
  double log_intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares fit of log y against log N.
inline PowerLawFit fit_power_law(const std::vector<double>& n_values,
                                 const std::vector<double>& y_values) {
  if (n_values.size() != y_values.size() || n_values.size() < 3)
    throw std::invalid_argument("fit_power_law needs >= 3 aligned points");
  const std::size_t n = n_values.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y_values[i] > 0.0) || !(n_values[i] > 0.0))
      throw std::domain_error("fit_power_law requires positive values");
    lx[i] = std::log(n_values[i]);
    ly[i] = std::log(y_values[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dn = static_cast<double>(n);
  PowerLawFit fit;
  fit.alpha = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  fit.log_intercept = (sy - fit.alpha * sx) / dn;
  double ss_res = 0, ss_tot = 0, mean_y = sy / dn;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = fit.log_intercept + fit.alpha * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

struct ScalingOptions {
  SystemParams base;           // template: lambda_2, gammas, n_c, frequencies
  double engine_ratio = 10.0;  // n_h/n_c used when regime = Engine
  double refrigerator_ratio = 0.4;
  int starts = 64;
  int fit_n_min = 0;  // 0 = full requested range
  int fit_n_max = 0;
  int threads = 0;
  ScalingOptions() { base = SystemParams::homogeneous(2, 0.1, 0.05, 0.2, 0.5, 0.5); }
};

struct ScalingResult {
  std::vector<int> n_values;
  std::vector<double> smax_scaled_mean;  // mean of (2 pi)^N S_max per N
  std::vector<double> smax_scaled_std;
  std::vector<double> entrainment_mean;  // mean of (1/4) sum_j |rho_1j| per N
  // optimal phases phi_{j1} (j = 2..N+1), per N and realization
  std::vector<std::vector<std::vector<double>>> optimal_phases;
  PowerLawFit fit;
  Regime regime = Regime::Engine;
  int realizations = 0;
  int failed = 0;
  std::uint64_t seed = 0;
};

// N-scaling study over i.i.d. random drive inhomogeneities: lambda_2 held
// fixed, lambda_j = u * lambda_2 with u uniform on (0, 1] for j >= 3.
// Substream seeds are derived per (N, realization), so results do not depend
// on the worker schedule.
inline ScalingResult scaling_with_n(int n_min, int n_max, int realizations, Regime regime,
                                    std::uint64_t seed, const ScalingOptions& opts = {}) {
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad N range");
  if (n_max > 64) throw std::invalid_argument("scaling_with_n caps N at 64");
  if (regime == Regime::Neutral)
    throw std::invalid_argument("scaling_with_n: choose Engine or Refrigerator");

  const double n_h = opts.base.n_c *
                     (regime == Regime::Engine ? opts.engine_ratio : opts.refrigerator_ratio);
  const double lam2 = opts.base.drive_amps.at(0);

  ScalingResult out;
  out.regime = regime;
  out.realizations = realizations;
  out.seed = seed;
  const int n_count = n_max - n_min + 1;
  out.n_values.resize(static_cast<std::size_t>(n_count));
  for (int i = 0; i < n_count; ++i) out.n_values[static_cast<std::size_t>(i)] = n_min + i;

  struct Sample {
    double smax_scaled = 0.0;
    double entrainment = 0.0;
    std::vector<double> phases;
    bool ok = false;
  };
  std::vector<std::vector<Sample>> samples(
      static_cast<std::size_t>(n_count),
      std::vector<Sample>(static_cast<std::size_t>(realizations)));

  parallel_for(n_count * realizations, [&](int task) {
    const int ni = task / realizations;
    const int r = task % realizations;
    const int n = n_min + ni;
    Sample& s = samples[static_cast<std::size_t>(ni)][static_cast<std::size_t>(r)];
    try {
      SystemParams p = opts.base;
      p.n_deg = n;
      p.n_h = n_h;
      std::mt19937_64 gen(derive_seed(seed, static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(r)));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      p.drive_amps.assign(static_cast<std::size_t>(n), lam2);
      for (int j = 1; j < n; ++j)
        p.drive_amps[static_cast<std::size_t>(j)] = lam2 * (1.0 - u(gen));  // uniform (0, 1]
      require_valid(p);
      DensityMatrix rho = solve_numeric(build_liouvillian(p));
      SyncResult sync = maximize_sync(rho, opts.starts, 1e-12,
                                      derive_seed(seed ^ 0xF17ULL, static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(r)));
      s.smax_scaled = sync.s_max_scaled;
      double ent = 0.0;
      for (int j = 2; j < p.dim(); ++j) ent += std::abs(rho.mat(1, j));
      s.entrainment = ent / 4.0;
      if (!sync.optimal_phase_sets.empty()) {
        const auto& ph = sync.optimal_phase_sets.front().phases;
        s.phases.resize(static_cast<std::size_t>(n));
        for (int j = 2; j < p.dim(); ++j)
          s.phases[static_cast<std::size_t>(j - 2)] =
              wrap_phase(ph[static_cast<std::size_t>(j - 1)] - ph[0]);
      }
      s.ok = true;
    } catch (const std::exception&) {
      s.ok = false;
    }
  }, opts.threads);

  out.smax_scaled_mean.resize(static_cast<std::size_t>(n_count));
  out.smax_scaled_std.resize(static_cast<std::size_t>(n_count));
  out.entrainment_mean.resize(static_cast<std::size_t>(n_count));
  out.optimal_phases.resize(static_cast<std::size_t>(n_count));
  int total = 0;
  for (int ni = 0; ni < n_count; ++ni) {
    double sum = 0, sum2 = 0, esum = 0;
    int ok = 0;
    for (const Sample& s : samples[static_cast<std::size_t>(ni)]) {
      ++total;
      if (!s.ok) {
        ++out.failed;
        continue;
      }
      ++ok;
      sum += s.smax_scaled;
      sum2 += s.smax_scaled * s.smax_scaled;
      esum += s.entrainment;
      out.optimal_phases[static_cast<std::size_t>(ni)].push_back(s.phases);
    }
    if (ok == 0) throw NumericError("scaling_with_n: all realizations failed at one N");
    double mean = sum / ok;
    out.smax_scaled_mean[static_cast<std::size_t>(ni)] = mean;
    out.smax_scaled_std[static_cast<std::size_t>(ni)] =
        ok > 1 ? std::sqrt(std::max(0.0, (sum2 - ok * mean * mean) / (ok - 1))) : 0.0;
    out.entrainment_mean[static_cast<std::size_t>(ni)] = esum / ok;
  }
  if (out.failed > total / 100)
    throw NumericError("scaling_with_n: more than 1% of realizations failed");

  // power-law fit over the configured window (default: full range)
  const int fmin = opts.fit_n_min > 0 ? opts.fit_n_min : n_min;
  const int fmax = opts.fit_n_max > 0 ? opts.fit_n_max : n_max;
  std::vector<double> fn, fy;
  for (int ni = 0; ni < n_count; ++ni) {
    int n = out.n_values[static_cast<std::size_t>(ni)];
    if (n >= fmin && n <= fmax && out.smax_scaled_mean[static_cast<std::size_t>(ni)] > 0.0) {
      fn.push_back(static_cast<double>(n));
      fy.push_back(out.smax_scaled_mean[static_cast<std::size_t>(ni)]);
    }
  }
  if (fn.size() >= 3) out.fit = fit_power_law(fn, fy);
  return out;
}

// All realizations' optimizing phases {phi_j1} at the selected N.
inline std::vector<std::vector<double>> optimal_phase_cloud(const ScalingResult& result,
                                                            int n_select) {
  for (std::size_t i = 0; i < result.n_values.size(); ++i)
    if (result.n_values[i] == n_select) return result.optimal_phases[i];
  throw std::invalid_argument("optimal_phase_cloud: N = " + std::to_string(n_select) +
                              " was not computed");
}

}  // namespace maser
