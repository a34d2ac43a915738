#pragma once

#include <cmath>

#include <Eigen/Eigenvalues>

#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// int_0^T exp(-i t mu / h) dt = T sinc(x/2) exp(-i x/2), x = T mu / h.
inline Complex propagator_integral(Complex mu, double t, double h) {
  const Complex half = 0.5 * t * mu / h;
  const Complex sinc = std::abs(half) < 1e-4 ? 1.0 - half * half / 6.0 + half * half * half * half / 120.0
                                             : std::sin(half) / half;
  return t * sinc * std::exp(-kI * half);
}

struct ParametrixResult {
  CMat e;             // int_0^T exp(-i t (A - z)/h) dt
  double residual = 0.0;
};

/// Forward solution of (i/h)(A - z) E = I - exp(-iT(A - z)/h) for Hermitian A,
/// built from the eigendecomposition; the residual multiplies out the left side.
inline ParametrixResult forward_parametrix_check(const CMat& a, Complex z, double t, double h) {
  if (a.rows() != a.cols()) throw DimensionError("forward_parametrix_check: A must be square");
  if (!(h > 0.0)) throw InvalidArgument("forward_parametrix_check: h must be positive");
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("forward_parametrix_check: A must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  const CMat& v = es.eigenvectors();
  const auto n = a.rows();
  CVec integral(n), decay(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex mu = es.eigenvalues()(j) - z;
    integral(j) = propagator_integral(mu, t, h);
    decay(j) = std::exp(-kI * t * mu / h);
  }
  ParametrixResult out;
  out.e = v * integral.asDiagonal() * v.adjoint();
  const CMat id = CMat::Identity(n, n);
  const CMat lhs = (kI / h) * (a - z * id) * out.e;
  const CMat rhs = id - v * decay.asDiagonal() * v.adjoint();
  out.residual = (lhs - rhs).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace poincarezeta
