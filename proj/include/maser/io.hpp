#pragma once

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

#include "maser/density_matrix.hpp"
#include "maser/experiments.hpp"
#include "maser/liouvillian.hpp"
#include "maser/params.hpp"
#include "maser/sync.hpp"

namespace maser {

using json = nlohmann::json;

// Full double precision so golden-file comparisons stay meaningful.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline json to_json(const SystemParams& p) {
  return json{{"n_deg", p.n_deg},
              {"omega1", p.omega1},
              {"omega_deg", p.omega_deg},
              {"drive_freq", p.drive_freq},
              {"drive_amps", p.drive_amps},
              {"gamma_h", p.gamma_h},
              {"gamma_c", p.gamma_c},
              {"n_h", p.n_h},
              {"n_c", p.n_c},
              {"detuning", p.detuning}};
}

inline SystemParams params_from_json(const json& j) {
  SystemParams p;
  p.n_deg = j.at("n_deg").get<int>();
  p.omega1 = j.value("omega1", 1.0);
  p.omega_deg = j.at("omega_deg").get<double>();
  p.drive_freq = j.at("drive_freq").get<double>();
  // complex amplitudes are rejected: entries must be plain real numbers
  for (const auto& a : j.at("drive_amps"))
    if (!a.is_number()) throw std::invalid_argument("drive_amps must be real numbers");
  p.drive_amps = j.at("drive_amps").get<std::vector<double>>();
  p.gamma_h = j.at("gamma_h").get<double>();
  p.gamma_c = j.at("gamma_c").get<double>();
  p.n_h = j.at("n_h").get<double>();
  p.n_c = j.at("n_c").get<double>();
  p.detuning = j.contains("detuning") ? j.at("detuning").get<double>()
                                      : (p.omega_deg - p.omega1) - p.drive_freq;
  return p;
}

inline json to_json(const PhaseVector& pv) { return json(pv.phases); }

inline json to_json(const SyncResult& r) {
  json sets = json::array();
  for (const auto& pv : r.optimal_phase_sets) sets.push_back(to_json(pv));
  return json{{"s_max", r.s_max},
              {"s_max_scaled", r.s_max_scaled},
              {"optimal_phase_sets", sets},
              {"branch", to_string(r.branch)},
              {"entrainment_contribution", r.entrainment_contribution},
              {"degenerate", r.degenerate}};
}

inline json to_json(const DensityMatrix& rho) {
  json entries = json::array();
  for (int c = 0; c < rho.dim(); ++c)
    for (int r = 0; r < rho.dim(); ++r)
      entries.push_back({{"row", r},
                         {"col", c},
                         {"re", rho.mat(r, c).real()},
                         {"im", rho.mat(r, c).imag()}});
  return json{{"dim", rho.dim()}, {"entries", entries}};
}

// (row, col, re, im) CSV of a complex matrix; used for steady states and the
// superoperator debug dump.
inline void write_matrix_csv(std::ostream& os, const Matrix& m,
                             const std::string& provenance_json) {
  if (!provenance_json.empty()) os << "# params: " << provenance_json << "\n";
  os << "row,col,re,im\n";
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r)
      os << r << "," << c << "," << fmt_double(m(r, c).real()) << ","
         << fmt_double(m(r, c).imag()) << "\n";
}

inline void write_grid_csv(std::ostream& os, const PhaseGrid& g,
                           const std::string& provenance_json) {
  if (!provenance_json.empty()) os << "# params: " << provenance_json << "\n";
  // header row carries the column axis values; each data row leads with its
  // row axis value
  os << "phi_axis" << g.axis_i + 1 << "1\\phi_axis" << g.axis_j + 1 << "1";
  for (double v : g.axis_values) os << "," << fmt_double(v);
  os << "\n";
  for (int a = 0; a < g.s.rows(); ++a) {
    os << fmt_double(g.axis_values[static_cast<std::size_t>(a)]);
    for (int b = 0; b < g.s.cols(); ++b) os << "," << fmt_double(g.s(a, b));
    os << "\n";
  }
}

inline void write_bath_sweep_csv(std::ostream& os, const std::vector<BathSweepRow>& rows,
                                 const std::string& provenance_json) {
  if (!provenance_json.empty()) os << "# params: " << provenance_json << "\n";
  os << "ratio,n_h,s_max_numeric,s_max_closed,entrainment,branch,ok,error\n";
  for (const auto& r : rows)
    os << fmt_double(r.ratio) << "," << fmt_double(r.n_h) << ","
       << fmt_double(r.s_max_numeric) << "," << fmt_double(r.s_max_closed) << ","
       << fmt_double(r.entrainment) << "," << to_string(r.branch) << "," << (r.ok ? 1 : 0)
       << "," << r.error << "\n";
}

inline void write_drive_sweep_csv(std::ostream& os, const std::vector<DriveSweepRow>& rows,
                                  const std::string& provenance_json) {
  if (!provenance_json.empty()) os << "# params: " << provenance_json << "\n";
  os << "ratio,s_max_engine,entrainment_engine,s_max_refrigerator,"
        "entrainment_refrigerator,ok,error\n";
  for (const auto& r : rows)
    os << fmt_double(r.ratio) << "," << fmt_double(r.s_max_engine) << ","
       << fmt_double(r.entrainment_engine) << "," << fmt_double(r.s_max_refrigerator) << ","
       << fmt_double(r.entrainment_refrigerator) << "," << (r.ok ? 1 : 0) << "," << r.error
       << "\n";
}

inline void write_scaling_csv(std::ostream& os, const ScalingResult& r,
                              const std::string& provenance_json) {
  if (!provenance_json.empty()) os << "# params: " << provenance_json << "\n";
  os << "# regime: " << to_string(r.regime) << ", realizations: " << r.realizations
     << ", seed: " << r.seed << ", failed: " << r.failed << "\n";
  os << "# fit: alpha=" << fmt_double(r.fit.alpha)
     << " log_intercept=" << fmt_double(r.fit.log_intercept)
     << " r_squared=" << fmt_double(r.fit.r_squared) << "\n";
  os << "n,smax_scaled_mean,smax_scaled_std,entrainment_mean\n";
  for (std::size_t i = 0; i < r.n_values.size(); ++i)
    os << r.n_values[i] << "," << fmt_double(r.smax_scaled_mean[i]) << ","
       << fmt_double(r.smax_scaled_std[i]) << "," << fmt_double(r.entrainment_mean[i]) << "\n";
}

inline void write_phase_cloud_csv(std::ostream& os, const ScalingResult& r,
                                  const std::string& provenance_json) {
  if (!provenance_json.empty()) os << "# params: " << provenance_json << "\n";
  os << "n,realization,j,phi_j1\n";
  for (std::size_t ni = 0; ni < r.n_values.size(); ++ni)
    for (std::size_t rz = 0; rz < r.optimal_phases[ni].size(); ++rz)
      for (std::size_t j = 0; j < r.optimal_phases[ni][rz].size(); ++j)
        os << r.n_values[ni] << "," << rz << "," << j + 2 << ","
           << fmt_double(r.optimal_phases[ni][rz][j]) << "\n";
}

}  // namespace maser
