#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "poincarezeta/core/linalg.hpp"
#include "poincarezeta/quantum/torus.hpp"

namespace poincarezeta {

/// Block matrix M(z, h): block (i, k) maps section k to section i and is
/// structurally zero unless i is a successor of k.
class OpenMapMatrix {
 public:
  OpenMapMatrix() = default;

  /// Empty map with the given section dimensions; all blocks structurally zero.
  OpenMapMatrix(std::vector<Eigen::Index> dims, double h, Complex z, std::string meta)
      : dims_(std::move(dims)), h_(h), z_(z), meta_(std::move(meta)) {
    const auto s = dims_.size();
    blocks_.assign(s, std::vector<CMat>(s));
    present_.assign(s, std::vector<bool>(s, false));
  }

  /// Single-section map wrapping a square matrix.
  static OpenMapMatrix single(const CMat& m, double h, Complex z, std::string meta) {
    if (m.rows() != m.cols()) throw DimensionError("OpenMapMatrix: single block must be square");
    OpenMapMatrix out({m.rows()}, h, z, std::move(meta));
    out.set_block(0, 0, m);
    return out;
  }

  std::size_t sections() const { return dims_.size(); }
  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index dim(std::size_t i) const { return dims_.at(i); }
  Eigen::Index total_dim() const {
    Eigen::Index t = 0;
    for (auto d : dims_) t += d;
    return t;
  }
  double h() const { return h_; }
  Complex z() const { return z_; }
  const std::string& meta() const { return meta_; }
  void set_z(Complex z) { z_ = z; }
  void set_meta(std::string meta) { meta_ = std::move(meta); }

  bool has_block(std::size_t i, std::size_t k) const { return present_.at(i).at(k); }

  const CMat& block(std::size_t i, std::size_t k) const {
    if (!has_block(i, k)) throw InvalidArgument("OpenMapMatrix: block is structurally zero");
    return blocks_[i][k];
  }

  void set_block(std::size_t i, std::size_t k, CMat m) {
    if (m.rows() != dim(i) || m.cols() != dim(k)) throw DimensionError("OpenMapMatrix: block shape mismatch");
    blocks_.at(i).at(k) = std::move(m);
    present_[i][k] = true;
  }

  /// J_+(k): sections i with a stored block (i, k).
  std::set<int> successors(std::size_t k) const {
    std::set<int> out;
    for (std::size_t i = 0; i < sections(); ++i)
      if (present_[i][k]) out.insert(static_cast<int>(i));
    return out;
  }

  Eigen::Index offset(std::size_t i) const {
    Eigen::Index o = 0;
    for (std::size_t j = 0; j < i; ++j) o += dims_[j];
    return o;
  }

  CMat dense() const {
    const auto n = total_dim();
    CMat out = CMat::Zero(n, n);
    for (std::size_t i = 0; i < sections(); ++i)
      for (std::size_t k = 0; k < sections(); ++k)
        if (present_[i][k]) out.block(offset(i), offset(k), dims_[i], dims_[k]) = blocks_[i][k];
    return out;
  }

  double operator_norm() const {
    return spectral_norm(dense());
  }

 private:
  std::vector<Eigen::Index> dims_;
  double h_ = 0.0;
  Complex z_{0.0, 0.0};
  std::string meta_;
  std::vector<std::vector<CMat>> blocks_;
  std::vector<std::vector<bool>> present_;
};

/// Right-multiplies each block (i, k) by diag(exp(i z t_k / h)), with t_k the
/// return-time samples on the departure grid of section k.
inline OpenMapMatrix dress_with_energy_phase(const OpenMapMatrix& m0, const std::vector<Vec>& t_plus, Complex z) {
  if (t_plus.size() != m0.sections()) throw DimensionError("dress_with_energy_phase: one time profile per section");
  OpenMapMatrix out = m0;
  out.set_z(m0.z() + z);
  for (std::size_t k = 0; k < m0.sections(); ++k) {
    if (t_plus[k].size() != m0.dim(k)) throw DimensionError("dress_with_energy_phase: time profile length mismatch");
    const CVec phase = (kI * z * t_plus[k].cast<Complex>() / m0.h()).array().exp();
    for (std::size_t i = 0; i < m0.sections(); ++i)
      if (m0.has_block(i, k)) out.set_block(i, k, m0.block(i, k) * phase.asDiagonal());
  }
  return out;
}

/// Constant return time T on every section.
inline OpenMapMatrix dress_with_energy_phase(const OpenMapMatrix& m0, double t_plus, Complex z) {
  std::vector<Vec> t;
  for (std::size_t k = 0; k < m0.sections(); ++k) t.push_back(Vec::Constant(m0.dim(k), t_plus));
  return dress_with_energy_phase(m0, t, z);
}

/// d/dz of the dressed map: block (i, k) times diag(i t_k / h).
inline OpenMapMatrix dressing_derivative(const OpenMapMatrix& dressed, const std::vector<Vec>& t_plus) {
  OpenMapMatrix out = dressed;
  for (std::size_t k = 0; k < dressed.sections(); ++k) {
    const CVec factor = kI * t_plus.at(k).cast<Complex>() / dressed.h();
    for (std::size_t i = 0; i < dressed.sections(); ++i)
      if (dressed.has_block(i, k)) out.set_block(i, k, dressed.block(i, k) * factor.asDiagonal());
  }
  return out;
}

/// Blockwise Pi_i M_ik Pi_k.
inline OpenMapMatrix truncate(const OpenMapMatrix& m, const std::vector<SpectralProjector>& pis) {
  if (pis.size() != m.sections()) throw DimensionError("truncate: one projector per section");
  for (std::size_t k = 0; k < m.sections(); ++k)
    if (pis[k].pi.rows() != m.dim(k) || pis[k].pi.cols() != m.dim(k)) throw DimensionError("truncate: projector size");
  OpenMapMatrix out(m.dims(), m.h(), m.z(), m.meta() + "+truncated");
  for (std::size_t i = 0; i < m.sections(); ++i)
    for (std::size_t k = 0; k < m.sections(); ++k)
      if (m.has_block(i, k)) out.set_block(i, k, pis[i].pi * m.block(i, k) * pis[k].pi);
  return out;
}

/// Numerical rank: singular values above tol * largest.
inline int numerical_rank(const CMat& a, double tol = 1e-10) {
  if (a.size() == 0) return 0;
  const Vec s = singular_values(a);
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

}  // namespace poincarezeta
