#pragma once

#include <Eigen/Dense>

#include "maser/density_matrix.hpp"
#include "maser/params.hpp"

namespace maser {

// Generator of the rotating-frame master equation, stored as a dense
// D^2 x D^2 matrix acting on column-stacked density matrices:
//   vec(A rho B) = (B^T kron A) vec(rho).
// The convention is fixed project-wide; do not mix with row-stacking.
struct Superoperator {
  int dim = 0;          // D, the Hilbert-space dimension
  Matrix mat;           // D^2 x D^2
};

inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvectorize(const Vector& v, int dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

namespace detail {

// Adds rate * (B^T kron A) to s, i.e. the map rho -> rate * A rho B.
inline void add_sandwich(Matrix& s, const Matrix& a, const Matrix& b, Complex rate) {
  const int d = static_cast<int>(a.rows());
  Matrix bt = b.transpose();
  for (int bc = 0; bc < d; ++bc)
    for (int br = 0; br < d; ++br) {
      Complex w = rate * bt(br, bc);
      if (w == Complex(0.0)) continue;
      s.block(br * d, bc * d, d, d) += w * a;
    }
}

}  // namespace detail

// H0 - H~ + V~ in the fixed basis: diagonal (0, omega1 + Omega/2,
// omega_deg - Omega/2, ...), drive amplitudes on the (1,j) off-diagonals.
inline Matrix build_rotating_hamiltonian(const SystemParams& p) {
  require_valid(p);
  const int d = p.dim();
  Matrix h = Matrix::Zero(d, d);
  h(1, 1) = p.omega1 + p.drive_freq / 2.0;
  for (int j = 2; j < d; ++j) {
    h(j, j) = p.omega_deg - p.drive_freq / 2.0;
    h(1, j) = p.drive_amps[static_cast<std::size_t>(j - 2)];
    h(j, 1) = p.drive_amps[static_cast<std::size_t>(j - 2)];
  }
  return h;
}

// Lindblad dissipator of the maser, rate convention
//   L[X] rho = 2 X rho X^dag - {X^dag X, rho}   (no 1/2).
// Hot bath couples |0><j| for every manifold level, cold bath |0><1|.
inline Superoperator build_dissipator(const SystemParams& p) {
  require_valid(p);
  const int d = p.dim();
  Superoperator s{d, Matrix::Zero(d * d, d * d)};
  const Matrix id = Matrix::Identity(d, d);
  auto add_jump = [&](int a, int b, double rate) {
    // X = |a><b|
    if (rate == 0.0) return;
    Matrix x = Matrix::Zero(d, d);
    x(a, b) = 1.0;
    Matrix xdx = x.adjoint() * x;
    detail::add_sandwich(s.mat, x, x.adjoint(), Complex(2.0 * rate));
    detail::add_sandwich(s.mat, xdx, id, Complex(-rate));
    detail::add_sandwich(s.mat, id, xdx, Complex(-rate));
  };
  add_jump(0, 1, p.gamma_c * (1.0 + p.n_c));
  add_jump(1, 0, p.gamma_c * p.n_c);
  for (int j = 2; j < d; ++j) {
    add_jump(0, j, p.gamma_h * (1.0 + p.n_h));
    add_jump(j, 0, p.gamma_h * p.n_h);
  }
  return s;
}

// Full generator of d(rho)/dt = -i [H, rho] + D[rho].
inline Superoperator build_liouvillian(const SystemParams& p) {
  Superoperator s = build_dissipator(p);
  const Matrix h = build_rotating_hamiltonian(p);
  const Matrix id = Matrix::Identity(p.dim(), p.dim());
  const Complex mi(0.0, -1.0);
  detail::add_sandwich(s.mat, h, id, mi);
  detail::add_sandwich(s.mat, id, h, -mi);
  return s;
}

inline Matrix apply(const Superoperator& s, const Matrix& rho) {
  if (rho.rows() != s.dim || rho.cols() != s.dim)
    throw std::invalid_argument("apply: dimension mismatch");
  return unvectorize(s.mat * vectorize(rho), s.dim);
}

inline Matrix apply(const Superoperator& s, const DensityMatrix& rho) {
  return maser::apply(s, rho.mat);
}

}  // namespace maser
