#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "maser/density_matrix.hpp"
#include "maser/liouvillian.hpp"
#include "maser/params.hpp"

namespace maser {

// Coefficients of the normalization quadratic F = A N^2 + B N + C shared by
// every steady-state matrix element in the homogeneous-drive closed form.
struct AnalyticCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double f_value = 0.0;
};

namespace detail {

inline void require_closed_form(const SystemParams& p, const char* op) {
  require_valid(p);
  if (!p.homogeneous_drive())
    throw NotApplicableError(std::string(op) + " requires a homogeneous nonzero drive");
  if (!p.resonant())
    throw NotApplicableError(std::string(op) + " requires resonance (detuning = 0)");
}

}  // namespace detail

inline AnalyticCoefficients coeff_F(const SystemParams& p) {
  detail::require_closed_form(p, "coeff_F");
  const double lam = p.drive_amps[0], l2 = lam * lam;
  const double gh = p.gamma_h, gc = p.gamma_c, nh = p.n_h, nc = p.n_c;
  const double gsum = gc * (1.0 + nc) + gh * (1.0 + nh);
  AnalyticCoefficients r;
  r.a = l2 * nh * gsum;
  r.b = l2 * (gc * (1.0 + 3.0 * nc + 2.0 * nh * nc) + gh * (1.0 + nh) * (1.0 + 2.0 * nh)) +
        nh * gh * gc * (1.0 + nh) * (1.0 + nc) * gsum;
  r.c = gh * gc * (1.0 + nh) * (1.0 + nh) * (1.0 + 2.0 * nc) * gsum;
  const double n = static_cast<double>(p.n_deg);
  r.f_value = r.a * n * n + r.b * n + r.c;
  return r;
}

// Closed-form steady state for homogeneous resonant driving. All coherences
// share the normalization F; the degenerate-manifold populations carry a
// gamma_c factor on the lambda^2 (n_c - n_h) term (the bare term is
// dimensionally inconsistent and cross-checked against the nullspace here).
inline DensityMatrix solve_analytic(const SystemParams& p) {
  detail::require_closed_form(p, "solve_analytic");
  const double lam = p.drive_amps[0], l2 = lam * lam;
  const double gh = p.gamma_h, gc = p.gamma_c, nh = p.n_h, nc = p.n_c;
  const double gsum = gc * (1.0 + nc) + gh * (1.0 + nh);
  const double n = static_cast<double>(p.n_deg);
  const double f = coeff_F(p).f_value;

  const Complex r1k(0.0, lam * (nc - nh) * (1.0 + nh) * gc * gh / f);
  const double rjl = l2 * gc * (nc - nh) / f;
  const double r11 =
      (n * l2 * (1.0 + nh) * (nh * gh + nc * gc) +
       gc * gh * nc * (1.0 + nh) * (1.0 + nh) * gsum) / f;
  const double rjj =
      ((n * l2 * nh + gc * gh * nh * (1.0 + nh) * (1.0 + nc)) * gsum +
       gc * l2 * (nc - nh)) / f;

  const int d = p.dim();
  Matrix rho = Matrix::Zero(d, d);
  rho(1, 1) = r11;
  for (int j = 2; j < d; ++j) {
    rho(j, j) = rjj;
    rho(1, j) = r1k;
    rho(j, 1) = std::conj(r1k);
    for (int l = 2; l < d; ++l)
      if (l != j) rho(j, l) = rjl;
  }
  rho(0, 0) = 1.0 - r11 - n * rjj;
  return make_density(std::move(rho));
}

// Steady state via the trace-constrained linear solve: one row of the
// (singular) Liouvillian is replaced by the trace functional and the system
// is solved for vec(rho) with unit right-hand side on that row.
inline DensityMatrix solve_numeric(const Superoperator& s) {
  const int d = s.dim;
  Matrix m = s.mat;
  for (int c = 0; c < d * d; ++c) m(0, c) = 0.0;
  for (int k = 0; k < d; ++k) m(0, k * d + k) = 1.0;
  Vector rhs = Vector::Zero(d * d);
  rhs(0) = 1.0;

  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible())
    throw NonUniqueSteadyStateError(
        "trace-constrained system is singular: steady state is not unique");
  Vector v = lu.solve(rhs);
  if (!v.allFinite()) throw NumericError("solve_numeric: linear solve produced non-finite values");

  Matrix rho = unvectorize(v, d);
  double asym = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-11)
    throw NumericError("solve_numeric: pre-hermitization asymmetry " + std::to_string(asym));
  rho = ((rho + rho.adjoint()) / 2.0).eval();

  double res = (s.mat * vectorize(rho)).cwiseAbs().maxCoeff();
  if (res > 1e-10)
    throw NumericError("solve_numeric: residual " + std::to_string(res) + " exceeds 1e-10");
  return make_density(std::move(rho));
}

// Independent oracle: extract the nullspace by full eigendecomposition.
// Slower than solve_numeric but free of the trace-row replacement trick.
inline DensityMatrix solve_numeric_eig(const Superoperator& s) {
  Eigen::ComplexEigenSolver<Matrix> es(s.mat);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  int null_count = 0, idx = -1;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) < 1e-9) {
      ++null_count;
      idx = i;
    }
  }
  if (null_count == 0) throw NumericError("no eigenvalue below 1e-9: no steady state found");
  if (null_count > 1)
    throw NonUniqueSteadyStateError("degenerate nullspace: " + std::to_string(null_count) +
                                    " eigenvalues below 1e-9");
  Matrix rho = unvectorize(es.eigenvectors().col(idx), s.dim);
  rho /= rho.trace();
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return make_density(std::move(rho));
}

// Max-norm of the generator applied to rho; the certification metric.
inline double residual(const Superoperator& s, const Matrix& rho) {
  if (rho.rows() != s.dim || rho.cols() != s.dim)
    throw std::invalid_argument("residual: dimension mismatch");
  return (s.mat * vectorize(rho)).cwiseAbs().maxCoeff();
}

inline double residual(const Superoperator& s, const DensityMatrix& rho) {
  return residual(s, rho.mat);
}

}  // namespace maser
