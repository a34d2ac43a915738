#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "poincarezeta/core/types.hpp"
#include "poincarezeta/quantum/open_map.hpp"

namespace poincarezeta {

/// det(I - M) by partial-pivoting LU.
inline Complex zeta(const CMat& m) {
  if (m.rows() != m.cols()) throw DimensionError("zeta: matrix must be square");
  if (m.size() == 0) return 1.0;
  return (CMat::Identity(m.rows(), m.cols()) - m).partialPivLu().determinant();
}

inline Complex zeta(const OpenMapMatrix& m) { return zeta(m.dense()); }

/// log det(I - M) as sum of logs of the LU pivots plus the permutation sign;
/// the imaginary part is defined modulo 2 pi.
inline Complex log_zeta(const CMat& m) {
  if (m.rows() != m.cols()) throw DimensionError("log_zeta: matrix must be square");
  if (m.size() == 0) return 0.0;
  Eigen::PartialPivLU<CMat> lu(CMat::Identity(m.rows(), m.cols()) - m);
  const CMat& u = lu.matrixLU();
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) acc += std::log(u(i, i));
  if (lu.permutationP().determinant() < 0) acc += Complex(0.0, kPi);
  return acc;
}

inline double spectral_radius(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::ComplexEigenSolver<CMat>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

/// exp(-sum_{k=1}^{K} tr(M^k)/k).
inline Complex zeta_trace_expansion(const CMat& m, int order) {
  if (m.rows() != m.cols()) throw DimensionError("zeta_trace_expansion: matrix must be square");
  if (order < 0) throw InvalidArgument("zeta_trace_expansion: order must be nonnegative");
  if (spectral_radius(m) >= 1.0) throw DivergentExpansion("zeta_trace_expansion: spectral radius >= 1");
  Complex sum = 0.0;
  CMat power = CMat::Identity(m.rows(), m.cols());
  for (int k = 1; k <= order; ++k) {
    power = power * m;
    sum += power.trace() / static_cast<double>(k);
  }
  return std::exp(-sum);
}

}  // namespace poincarezeta
