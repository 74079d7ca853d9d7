#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "maser/density_matrix.hpp"
#include "maser/params.hpp"
#include "maser/quadrature.hpp"
#include "maser/rng.hpp"
#include "maser/steady_state.hpp"

namespace maser {

inline double wrap_phase(double x) {
  x = std::fmod(x, 2.0 * M_PI);
  if (x < 0.0) x += 2.0 * M_PI;
  // fmod can return 2*pi after the negative branch when x is a tiny negative
  if (x >= 2.0 * M_PI) x = 0.0;
  return x;
}

inline double circular_distance(double a, double b) {
  double d = std::abs(wrap_phase(a) - wrap_phase(b));
  return std::min(d, 2.0 * M_PI - d);
}

// Point on the (D-1)-torus: entry i is the phase of basis level i+1,
// with the ground-level phase fixed to 0 as reference.
struct PhaseVector {
  std::vector<double> phases;

  void wrap() {
    for (double& x : phases) x = wrap_phase(x);
  }
};

inline double torus_distance(const PhaseVector& a, const PhaseVector& b) {
  if (a.phases.size() != b.phases.size())
    throw std::invalid_argument("torus_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.phases.size(); ++i)
    d = std::max(d, circular_distance(a.phases[i], b.phases[i]));
  return d;
}

// SU(D) coherent-state angles: D-1 polar angles in [0, pi/2] plus the
// azimuthal phases.
struct HusimiAngles {
  std::vector<double> thetas;
  PhaseVector phis;
};

enum class SyncBranch {
  RefrigeratorCooperative,
  EngineEntrainmentDominant,
  EngineMutualDominant,
  Diagonal,
  NumericOnly,
};

inline const char* to_string(SyncBranch b) {
  switch (b) {
    case SyncBranch::RefrigeratorCooperative: return "RefrigeratorCooperative";
    case SyncBranch::EngineEntrainmentDominant: return "EngineEntrainmentDominant";
    case SyncBranch::EngineMutualDominant: return "EngineMutualDominant";
    case SyncBranch::Diagonal: return "Diagonal";
    case SyncBranch::NumericOnly: return "NumericOnly";
  }
  return "?";
}

struct SyncResult {
  double s_max = 0.0;
  double s_max_scaled = 0.0;  // (2*pi)^(D-2) * s_max
  std::vector<PhaseVector> optimal_phase_sets;
  SyncBranch branch = SyncBranch::NumericOnly;
  double entrainment_contribution = 0.0;  // prefactor * sum_j |rho_{1j}|
  bool degenerate = false;                // diagonal state, no meaningful argmax
};

// Prefactor of the pair form sum_{n<m} |rho_nm| cos(...).
inline double pair_prefactor(int dim) {
  return 1.0 / (std::pow(2.0, dim) * std::pow(M_PI, dim - 2));
}

inline double l1_coherence(const Matrix& rho) {
  double s = 0.0;
  for (int n = 0; n < rho.rows(); ++n)
    for (int m = n + 1; m < rho.cols(); ++m) s += std::abs(rho(n, m));
  return s;
}
inline double l1_coherence(const DensityMatrix& rho) { return l1_coherence(rho.mat); }

namespace detail {

// Nonzero upper-triangle coherences in polar form.
struct CoherenceTerms {
  std::vector<int> n, m;
  std::vector<double> mag, arg;
  double l1 = 0.0;
};

inline CoherenceTerms coherence_terms(const Matrix& rho, double cutoff = 0.0) {
  CoherenceTerms t;
  for (int n = 0; n < rho.rows(); ++n)
    for (int m = n + 1; m < rho.cols(); ++m) {
      double mag = std::abs(rho(n, m));
      t.l1 += mag;
      if (mag > cutoff) {
        t.n.push_back(n);
        t.m.push_back(m);
        t.mag.push_back(mag);
        t.arg.push_back(std::arg(rho(n, m)));
      }
    }
  return t;
}

// Coherent-state coefficient magnitudes for given polar angles.
inline std::vector<double> coherent_magnitudes(const std::vector<double>& thetas) {
  const int d = static_cast<int>(thetas.size()) + 1;
  std::vector<double> m(static_cast<std::size_t>(d));
  double sin_prod = 1.0;
  for (int i = 0; i < d - 1; ++i) {
    m[static_cast<std::size_t>(i)] = std::cos(thetas[static_cast<std::size_t>(i)]) * sin_prod;
    sin_prod *= std::sin(thetas[static_cast<std::size_t>(i)]);
  }
  m[static_cast<std::size_t>(d - 1)] = sin_prod;
  return m;
}

}  // namespace detail

// Husimi-Q value Q = D!/pi^(D-1) <alpha|rho|alpha>.
inline double husimi_q(const Matrix& rho, const HusimiAngles& angles) {
  const int d = static_cast<int>(rho.rows());
  if (static_cast<int>(angles.thetas.size()) != d - 1 ||
      static_cast<int>(angles.phis.phases.size()) != d - 1)
    throw std::invalid_argument("husimi_q: angle count must be D-1");
  for (double th : angles.thetas)
    if (th < 0.0 || th > M_PI / 2.0 + 1e-12)
      throw std::invalid_argument("husimi_q: polar angles must lie in [0, pi/2]");
  auto mags = detail::coherent_magnitudes(angles.thetas);
  Vector alpha(d);
  alpha(0) = mags[0];
  for (int i = 1; i < d; ++i)
    alpha(i) = mags[static_cast<std::size_t>(i)] *
               std::polar(1.0, angles.phis.phases[static_cast<std::size_t>(i - 1)]);
  double val = (alpha.adjoint() * rho * alpha)(0, 0).real();
  return std::tgamma(d + 1.0) / std::pow(M_PI, d - 1) * val;
}
inline double husimi_q(const DensityMatrix& rho, const HusimiAngles& a) {
  return husimi_q(rho.mat, a);
}

// Phase quasi-distribution S on the (D-1)-torus. Both the full n != m sum
// and the pair (n < m) cosine form are evaluated; their mismatch would
// indicate a prefactor bookkeeping bug, so it is checked on every call.
inline double phase_distribution(const Matrix& rho, const PhaseVector& phases) {
  const int d = static_cast<int>(rho.rows());
  if (static_cast<int>(phases.phases.size()) != d - 1)
    throw std::invalid_argument("phase_distribution: need D-1 phases");
  auto ph = [&](int level) { return level == 0 ? 0.0 : phases.phases[static_cast<std::size_t>(level - 1)]; };

  Complex full_sum = 0.0;
  double pair_sum = 0.0;
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) {
      if (n == m) continue;
      full_sum += rho(n, m) * std::polar(1.0, ph(m) - ph(n));
      if (n < m)
        pair_sum += std::abs(rho(n, m)) * std::cos(ph(m) - ph(n) + std::arg(rho(n, m)));
    }
  const double pref_pair = pair_prefactor(d);
  double s_full = pref_pair / 2.0 * full_sum.real();
  double s_pair = pref_pair * pair_sum;
  if (std::abs(s_full - s_pair) > 1e-12)
    throw NumericError("phase_distribution: full-sum and pair forms disagree");
  return s_pair;
}
inline double phase_distribution(const DensityMatrix& rho, const PhaseVector& p) {
  return phase_distribution(rho.mat, p);
}

struct PhaseGrid {
  int axis_i = 0, axis_j = 0;       // indices into the PhaseVector
  std::vector<double> axis_values;  // shared by rows and columns, [0, 2*pi)
  Eigen::MatrixXd s;                // s(a, b): axis_i = axis_values[a], axis_j = axis_values[b]
};

inline PhaseGrid phase_distribution_grid(const Matrix& rho, int axis_i, int axis_j,
                                         const PhaseVector& fixed, int resolution) {
  const int d = static_cast<int>(rho.rows());
  if (resolution < 8) throw std::invalid_argument("phase_distribution_grid: resolution must be >= 8");
  if (axis_i < 0 || axis_j < 0 || axis_i >= d - 1 || axis_j >= d - 1 || axis_i == axis_j)
    throw std::invalid_argument("phase_distribution_grid: invalid axis indices");
  if (static_cast<int>(fixed.phases.size()) != d - 1)
    throw std::invalid_argument("phase_distribution_grid: fixed phases must have D-1 entries");
  PhaseGrid g;
  g.axis_i = axis_i;
  g.axis_j = axis_j;
  g.axis_values.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i)
    g.axis_values[static_cast<std::size_t>(i)] = 2.0 * M_PI * i / resolution;
  g.s.resize(resolution, resolution);
  PhaseVector p = fixed;
  for (int a = 0; a < resolution; ++a)
    for (int b = 0; b < resolution; ++b) {
      p.phases[static_cast<std::size_t>(axis_i)] = g.axis_values[static_cast<std::size_t>(a)];
      p.phases[static_cast<std::size_t>(axis_j)] = g.axis_values[static_cast<std::size_t>(b)];
      g.s(a, b) = phase_distribution(rho, p);
    }
  return g;
}
inline PhaseGrid phase_distribution_grid(const DensityMatrix& rho, int i, int j,
                                         const PhaseVector& fixed, int res) {
  return phase_distribution_grid(rho.mat, i, j, fixed, res);
}

// Quadrature oracle: integrates Q over the polar angles with measure
// prod_l cos(theta_l) sin(theta_l)^(2D-2l-1) and subtracts the uniform part.
// Independent of the closed form computed by phase_distribution.
inline double marginalize_husimi_numeric(const Matrix& rho, const PhaseVector& phases,
                                         int quad_points = 64) {
  const int d = static_cast<int>(rho.rows());
  if (d > 5)
    throw std::invalid_argument("marginalize_husimi_numeric: restricted to D <= 5");
  if (static_cast<int>(phases.phases.size()) != d - 1)
    throw std::invalid_argument("marginalize_husimi_numeric: need D-1 phases");
  const int na = d - 1;
  QuadratureRule gl = gauss_legendre(quad_points, 0.0, M_PI / 2.0);

  // fold the per-axis measure factor into the weights; axis l is 1-based
  std::vector<std::vector<double>> w(static_cast<std::size_t>(na));
  for (int l = 1; l <= na; ++l) {
    auto& wl = w[static_cast<std::size_t>(l - 1)];
    wl.resize(static_cast<std::size_t>(quad_points));
    for (int q = 0; q < quad_points; ++q) {
      double th = gl.nodes[static_cast<std::size_t>(q)];
      wl[static_cast<std::size_t>(q)] =
          gl.weights[static_cast<std::size_t>(q)] * std::cos(th) *
          std::pow(std::sin(th), 2 * d - 2 * l - 1);
    }
  }

  Vector phase_factors(d);
  phase_factors(0) = 1.0;
  for (int i = 1; i < d; ++i)
    phase_factors(i) = std::polar(1.0, phases.phases[static_cast<std::size_t>(i - 1)]);

  std::vector<int> idx(static_cast<std::size_t>(na), 0);
  std::vector<double> thetas(static_cast<std::size_t>(na));
  double integral = 0.0;
  const double qpref = std::tgamma(d + 1.0) / std::pow(M_PI, d - 1);
  while (true) {
    double weight = 1.0;
    for (int l = 0; l < na; ++l) {
      thetas[static_cast<std::size_t>(l)] = gl.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])];
      weight *= w[static_cast<std::size_t>(l)][static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])];
    }
    auto mags = detail::coherent_magnitudes(thetas);
    Vector alpha(d);
    for (int i = 0; i < d; ++i) alpha(i) = mags[static_cast<std::size_t>(i)] * phase_factors(i);
    integral += weight * qpref * (alpha.adjoint() * rho * alpha)(0, 0).real();
    int l = 0;
    while (l < na && ++idx[static_cast<std::size_t>(l)] == quad_points) {
      idx[static_cast<std::size_t>(l)] = 0;
      ++l;
    }
    if (l == na) break;
  }
  return integral - 1.0 / std::pow(2.0 * M_PI, d - 1);
}
inline double marginalize_husimi_numeric(const DensityMatrix& rho, const PhaseVector& p,
                                         int quad_points = 64) {
  return marginalize_husimi_numeric(rho.mat, p, quad_points);
}

namespace detail {

// S only depends on phase differences within connected components of the
// coherence graph, so each component not anchored to the ground level has a
// free overall shift. Canonicalize by zeroing the lowest level of each such
// component; levels with no coherences get phase 0.
inline void canonicalize_gauge(const CoherenceTerms& t, int dim, PhaseVector& pv) {
  std::vector<int> parent(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) parent[static_cast<std::size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<bool> linked(static_cast<std::size_t>(dim), false);
  for (std::size_t k = 0; k < t.n.size(); ++k) {
    if (t.mag[k] <= 1e-12) continue;
    int a = find(t.n[k]), b = find(t.m[k]);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    linked[static_cast<std::size_t>(t.n[k])] = true;
    linked[static_cast<std::size_t>(t.m[k])] = true;
  }
  std::vector<double> full(static_cast<std::size_t>(dim), 0.0);
  for (int i = 1; i < dim; ++i) full[static_cast<std::size_t>(i)] = pv.phases[static_cast<std::size_t>(i - 1)];
  std::vector<double> shift(static_cast<std::size_t>(dim), 0.0);
  std::vector<bool> have(static_cast<std::size_t>(dim), false);
  for (int i = 0; i < dim; ++i) {
    int r = find(i);
    if (!have[static_cast<std::size_t>(r)]) {
      have[static_cast<std::size_t>(r)] = true;
      shift[static_cast<std::size_t>(r)] = (r == 0) ? 0.0 : full[static_cast<std::size_t>(r)];
    }
  }
  for (int i = 1; i < dim; ++i) {
    if (!linked[static_cast<std::size_t>(i)]) {
      pv.phases[static_cast<std::size_t>(i - 1)] = 0.0;
    } else {
      pv.phases[static_cast<std::size_t>(i - 1)] =
          wrap_phase(full[static_cast<std::size_t>(i)] - shift[static_cast<std::size_t>(find(i))]);
    }
  }
}

// Objective normalized by the l1-norm so tolerances are scale free:
// f = sum_t mag_t cos(ph(m)-ph(n)+arg_t) / l1, maximized over the torus.
struct TorusObjective {
  const CoherenceTerms& t;
  int dim;

  double ph(const Eigen::VectorXd& x, int level) const {
    return level == 0 ? 0.0 : x(level - 1);
  }
  double value(const Eigen::VectorXd& x) const {
    double f = 0.0;
    for (std::size_t k = 0; k < t.n.size(); ++k)
      f += t.mag[k] * std::cos(ph(x, t.m[k]) - ph(x, t.n[k]) + t.arg[k]);
    return f / t.l1;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim - 1);
    for (std::size_t k = 0; k < t.n.size(); ++k) {
      double s = -t.mag[k] * std::sin(ph(x, t.m[k]) - ph(x, t.n[k]) + t.arg[k]) / t.l1;
      if (t.m[k] > 0) g(t.m[k] - 1) += s;
      if (t.n[k] > 0) g(t.n[k] - 1) -= s;
    }
    return g;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim - 1, dim - 1);
    for (std::size_t k = 0; k < t.n.size(); ++k) {
      double c = -t.mag[k] * std::cos(ph(x, t.m[k]) - ph(x, t.n[k]) + t.arg[k]) / t.l1;
      int im = t.m[k] - 1, in = t.n[k] - 1;
      if (im >= 0) h(im, im) += c;
      if (in >= 0) h(in, in) += c;
      if (im >= 0 && in >= 0) {
        h(im, in) -= c;
        h(in, im) -= c;
      }
    }
    return h;
  }
};

// Gradient ascent with backtracking line search, polished by guarded Newton
// steps (pseudo-inverse Hessian to ride out gauge-flat directions).
inline bool ascend(const TorusObjective& obj, Eigen::VectorXd& x, double tol, int max_iter) {
  double f = obj.value(x);
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd g = obj.gradient(x);
    if (g.cwiseAbs().maxCoeff() < tol) return true;
    if (iter > 0) {
      Eigen::MatrixXd h = obj.hessian(x);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      Eigen::VectorXd d = Eigen::VectorXd::Zero(x.size());
      for (int k = 0; k < es.eigenvalues().size(); ++k) {
        double lam = es.eigenvalues()(k);
        if (std::abs(lam) > 1e-9)
          d -= es.eigenvectors().col(k) * (es.eigenvectors().col(k).dot(g) / lam);
      }
      if (d.allFinite() && d.cwiseAbs().maxCoeff() < 10.0) {
        double fn = obj.value(x + d);
        if (fn >= f) {
          x += d;
          f = fn;
          continue;
        }
      }
    }
    double step = 1.0;
    double gg = g.squaredNorm();
    bool moved = false;
    while (step > 1e-18) {
      double fn = obj.value(x + step * g);
      if (fn > f + 1e-4 * step * gg) {
        x += step * g;
        f = fn;
        moved = true;
        break;
      }
      step /= 2.0;
    }
    if (!moved) return obj.gradient(x).cwiseAbs().maxCoeff() < 10.0 * tol;
  }
  return false;
}

}  // namespace detail

// Global maximum of S over the torus via multi-start local ascent with
// analytic gradients. Returns all distinct global optima after gauge
// canonicalization and clustering.
inline SyncResult maximize_sync(const Matrix& rho, int starts = 64, double tol = 1e-12,
                                std::uint64_t seed = 0x1234abcdULL) {
  const int d = static_cast<int>(rho.rows());
  if (starts < 1) throw std::invalid_argument("maximize_sync: starts must be >= 1");
  SyncResult r;
  r.branch = SyncBranch::NumericOnly;
  const double pref = pair_prefactor(d);
  double ent = 0.0;
  for (int j = 2; j < d; ++j) ent += std::abs(rho(1, j));
  r.entrainment_contribution = pref * ent;

  auto terms = detail::coherence_terms(rho);
  if (terms.l1 <= 1e-14) {
    r.degenerate = true;
    r.branch = SyncBranch::Diagonal;
    r.s_max = 0.0;
    r.s_max_scaled = 0.0;
    return r;
  }
  detail::TorusObjective obj{terms, d};

  std::vector<std::pair<double, Eigen::VectorXd>> found;
  int converged = 0;
  double best_any = -2.0;
  Eigen::VectorXd best_any_x;
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x(d - 1);
    if (s == 0) {
      x.setZero();
    } else if (s == 1 || s == 2) {
      // structured seeds at the cooperative/entrainment-dominant patterns
      double v = (s == 1) ? 3.0 * M_PI / 2.0 : M_PI / 2.0;
      x.setConstant(v);
      x(0) = 0.0;
    } else {
      std::mt19937_64 gen(derive_seed(seed, static_cast<std::uint64_t>(s)));
      std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
      for (int i = 0; i < d - 1; ++i) x(i) = u(gen);
    }
    bool ok = detail::ascend(obj, x, tol, 500);
    double f = obj.value(x);
    if (f > best_any) {
      best_any = f;
      best_any_x = x;
    }
    if (ok) {
      ++converged;
      found.emplace_back(f, x);
    }
  }
  if (converged == 0)
    throw NumericError("maximize_sync: no start converged; best objective " +
                       std::to_string(pref * terms.l1 * best_any));

  double fbest = -2.0;
  for (auto& [f, x] : found) fbest = std::max(fbest, f);

  std::vector<PhaseVector> optima;
  for (auto& [f, x] : found) {
    if (f < fbest - 1e-9) continue;
    PhaseVector pv;
    pv.phases.assign(x.data(), x.data() + x.size());
    pv.wrap();
    detail::canonicalize_gauge(terms, d, pv);
    bool dup = false;
    for (const auto& o : optima)
      if (torus_distance(o, pv) < 1e-4) {
        dup = true;
        break;
      }
    if (!dup) optima.push_back(pv);
  }
  std::sort(optima.begin(), optima.end(),
            [](const PhaseVector& a, const PhaseVector& b) { return a.phases < b.phases; });

  r.s_max = pref * terms.l1 * fbest;
  r.s_max_scaled = std::pow(2.0 * M_PI, d - 2) * r.s_max;
  r.optimal_phase_sets = std::move(optima);
  if (r.s_max < 1e-12 && terms.l1 <= 1e-12) {
    r.degenerate = true;
    r.branch = SyncBranch::Diagonal;
  }
  return r;
}
inline SyncResult maximize_sync(const DensityMatrix& rho, int starts = 64, double tol = 1e-12,
                                std::uint64_t seed = 0x1234abcdULL) {
  return maximize_sync(rho.mat, starts, tol, seed);
}

// Piecewise closed form for N = 2 with prefactor 1/(16 pi^2), and the
// corresponding optimal phase sets.
inline SyncResult closed_form_smax_n2(const SystemParams& p) {
  if (p.n_deg != 2) throw NotApplicableError("closed_form_smax_n2 requires N = 2");
  detail::require_closed_form(p, "closed_form_smax_n2");
  DensityMatrix rho = solve_analytic(p);
  const double r12 = std::abs(rho.mat(1, 2));
  const double r13 = std::abs(rho.mat(1, 3));
  const double r23 = std::abs(rho.mat(2, 3));
  const double pref = 1.0 / (16.0 * M_PI * M_PI);

  SyncResult r;
  r.entrainment_contribution = pref * (r12 + r13);
  Regime regime = regime_classify(p);
  if (regime == Regime::Neutral) {
    r.branch = SyncBranch::Diagonal;
    r.degenerate = true;
    return r;
  }
  if (regime == Regime::Refrigerator) {
    r.branch = SyncBranch::RefrigeratorCooperative;
    r.s_max = pref * (r12 + r13 + r23);
    r.optimal_phase_sets = {PhaseVector{{0.0, 3.0 * M_PI / 2.0, 3.0 * M_PI / 2.0}}};
  } else {
    const double k = std::abs(dissipation_to_driving_ratio(p));
    if (std::abs(k - 2.0) <= 1e-12) {
      // dead band: both branches agree analytically; take the max anyway
      r.branch = SyncBranch::EngineEntrainmentDominant;
      r.s_max = pref * std::max(r12 + r13 - r23, (1.0 + k * k / 2.0) * r23);
      r.optimal_phase_sets = {PhaseVector{{0.0, M_PI / 2.0, M_PI / 2.0}}};
    } else if (k > 2.0) {
      r.branch = SyncBranch::EngineEntrainmentDominant;
      r.s_max = pref * (r12 + r13 - r23);
      r.optimal_phase_sets = {PhaseVector{{0.0, M_PI / 2.0, M_PI / 2.0}}};
    } else {
      r.branch = SyncBranch::EngineMutualDominant;
      r.s_max = pref * (1.0 + k * k / 2.0) * r23;
      const double chi = std::asin(k / 2.0);  // branch fixed to [0, pi/2]
      PhaseVector a{{0.0, chi, M_PI - chi}};
      PhaseVector b{{0.0, M_PI - chi, chi}};
      r.optimal_phase_sets = {a, b};
      std::sort(r.optimal_phase_sets.begin(), r.optimal_phase_sets.end(),
                [](const PhaseVector& x, const PhaseVector& y) { return x.phases < y.phases; });
    }
  }
  r.s_max_scaled = std::pow(2.0 * M_PI, p.n_deg) * r.s_max;
  return r;
}

// Refrigerator-regime closed form for any N: the optimum saturates the
// l1-norm bound at phases phi_{j1} = 3*pi/2.
inline double closed_form_smax_refrigerator(const SystemParams& p) {
  detail::require_closed_form(p, "closed_form_smax_refrigerator");
  if (!(p.n_c > p.n_h))
    throw NotApplicableError("closed_form_smax_refrigerator requires n_c > n_h");
  const double lam = p.drive_amps[0];
  const double k = std::abs(dissipation_to_driving_ratio(p));
  const double n = static_cast<double>(p.n_deg);
  const double f = coeff_F(p).f_value;
  return std::pow(2.0 * M_PI, -n) * lam * lam * p.gamma_c * (p.n_c - p.n_h) *
         (n * n + (2.0 * k - 1.0) * n) / (8.0 * f);
}

// N -> infinity limit of (2*pi)^N S_max in the refrigerator regime.
inline double asymptotic_smax(const SystemParams& p) {
  require_valid(p);
  if (p.n_h > p.n_c) throw NotApplicableError("asymptotic_smax applies in the refrigerator regime");
  if (p.n_h == 0.0) throw std::domain_error("asymptotic_smax diverges at n_h = 0");
  return p.gamma_c * (p.n_c - p.n_h) /
         (8.0 * p.n_h * (p.gamma_c * (1.0 + p.n_c) + p.gamma_h * (1.0 + p.n_h)));
}

struct DiagonalityCheck {
  bool consistent = false;  // theorem holds for this state
  bool diagonal = false;
  PhaseVector witness_phases;  // phases with S > 0, when not diagonal
  double s_value = 0.0;        // S at the witness, or certified s_max if diagonal
};

// Constructive check of the D = 3 theorem: a nondiagonal state always admits
// phases with S > 0; a diagonal one has S identically zero.
inline DiagonalityCheck diagonality_sync_check_d3(const Matrix& rho, double coh_tol = 1e-10) {
  if (rho.rows() != 3 || rho.cols() != 3)
    throw std::invalid_argument("diagonality_sync_check_d3 requires D = 3");
  const double a01 = std::abs(rho(0, 1)), a02 = std::abs(rho(0, 2)), a12 = std::abs(rho(1, 2));
  const double p01 = std::arg(rho(0, 1)), p02 = std::arg(rho(0, 2)), p12 = std::arg(rho(1, 2));
  DiagonalityCheck c;
  const int nz = (a01 > coh_tol) + (a02 > coh_tol) + (a12 > coh_tol);
  if (nz == 0) {
    c.diagonal = true;
    SyncResult r = maximize_sync(rho, 16);
    c.s_value = r.s_max;
    c.consistent = r.s_max < 1e-12;
    c.witness_phases = PhaseVector{{0.0, 0.0}};
    return c;
  }
  double ph10 = 0.0, ph20 = 0.0;  // witness phases of levels 1 and 2
  if (nz == 3) {
    double cosine = std::cos(p01 - p02 + p12);
    if (cosine > coh_tol) {
      ph10 = M_PI / 2.0 - p01;
      ph20 = M_PI / 2.0 - p02;
    } else if (cosine < -coh_tol) {
      ph10 = -M_PI / 2.0 - p01;
      ph20 = M_PI / 2.0 - p02;
    } else {
      ph10 = -p01;
      ph20 = -p02;
    }
  } else {
    // compensate each nonzero coherence directly (cases 1 and 2)
    if (a01 > coh_tol && a02 > coh_tol) {
      ph10 = -p01;
      ph20 = -p02;
    } else if (a01 > coh_tol && a12 > coh_tol) {
      ph10 = -p01;
      ph20 = ph10 - p12;
    } else if (a02 > coh_tol && a12 > coh_tol) {
      ph20 = -p02;
      ph10 = ph20 + p12;
    } else if (a01 > coh_tol) {
      ph10 = -p01;
    } else if (a02 > coh_tol) {
      ph20 = -p02;
    } else {
      ph20 = -p12;  // only rho_12: fix the difference, keep ph10 = 0
    }
  }
  c.witness_phases = PhaseVector{{wrap_phase(ph10), wrap_phase(ph20)}};
  c.s_value = phase_distribution(rho, c.witness_phases);
  c.consistent = c.s_value > 0.0;
  return c;
}
inline DiagonalityCheck diagonality_sync_check_d3(const DensityMatrix& rho,
                                                  double coh_tol = 1e-10) {
  return diagonality_sync_check_d3(rho.mat, coh_tol);
}

}  // namespace maser
