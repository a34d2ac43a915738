#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// Largest singular value, from the spectrum of A^H A.
inline double spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  const CMat g = a.cols() <= a.rows() ? CMat(a.adjoint() * a) : CMat(a * a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Singular values in decreasing order.
inline Vec singular_values(const CMat& a) {
  Eigen::BDCSVD<CMat> svd(a);
  return svd.singularValues();
}

}  // namespace poincarezeta
