#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "maser/errors.hpp"

namespace maser {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hermitian, unit-trace, positive semidefinite matrix in the fixed basis
// |0>, |1>, |2>, ..., |N+1>.
struct DensityMatrix {
  Matrix mat;
  int dim() const { return static_cast<int>(mat.rows()); }
};

inline std::vector<std::string> check_density(const Matrix& rho, double herm_tol = 1e-12,
                                              double trace_tol = 1e-10,
                                              double psd_tol = -1e-10) {
  std::vector<std::string> v;
  if (rho.rows() != rho.cols()) {
    v.push_back("matrix is not square");
    return v;
  }
  double asym = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (asym > herm_tol) v.push_back("not Hermitian (max asymmetry " + std::to_string(asym) + ")");
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
    v.push_back("trace differs from 1 by " + std::to_string(std::abs(tr - 1.0)));
  Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0,
                                           Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < psd_tol)
    v.push_back("not positive semidefinite (min eigenvalue " + std::to_string(min_eig) + ")");
  return v;
}

// Certifies and wraps; throws NumericError listing every violated invariant.
inline DensityMatrix make_density(Matrix rho) {
  auto v = check_density(rho);
  if (!v.empty()) {
    std::string msg = "density matrix certification failed:";
    for (const auto& s : v) msg += " [" + s + "]";
    throw NumericError(msg);
  }
  return DensityMatrix{std::move(rho)};
}

}  // namespace maser
