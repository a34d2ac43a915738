#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "poincarezeta/core/parallel.hpp"
#include "poincarezeta/core/types.hpp"
#include "poincarezeta/spectral/resonances.hpp"

namespace poincarezeta {

/// Potential evaluated at complex arguments.
using ComplexPotential = std::function<Complex(Complex)>;

/// Quintic smoothstep s^3 (10 - 15 s + 6 s^2) on [0, 1].
inline double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

inline double smoothstep5_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

/// x -> x + i f(x), f(x) = tan(theta) x sigma((|x| - R)/R): zero on |x| <= R,
/// tan(theta) x for |x| >= 2R.
struct ScalingContour {
  double theta = 0.0;
  double radius = 1.0;

  ScalingContour(double theta_, double radius_) : theta(theta_), radius(radius_) {
    if (!(theta >= 0.0 && theta < kPi / 4)) throw InvalidArgument("ScalingContour: theta must lie in [0, pi/4)");
    if (!(radius > 0.0)) throw InvalidArgument("ScalingContour: R must be positive");
  }

  double f(double x) const { return std::tan(theta) * x * smoothstep5((std::abs(x) - radius) / radius); }

  double fprime(double x) const {
    const double s = (std::abs(x) - radius) / radius;
    return std::tan(theta) * (smoothstep5(s) + std::abs(x) * smoothstep5_derivative(s) / radius);
  }

  Complex point(double x) const { return Complex(x, f(x)); }
  Complex jacobian(double x) const { return Complex(1.0, fprime(x)); }
};

/// theta(h) = M1 h log(1/h).
inline double log_scaled_angle(double m1, double h) {
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("log_scaled_angle: need 0 < h < 1");
  return m1 * h * std::log(1.0 / h);
}

/// p_theta(x, xi) = (xi/(1 + i f'(x)))^2 + V(x + i f(x)) - 1.
inline Complex scaled_symbol(const ComplexPotential& v, const ScalingContour& c, double x, double xi) {
  const Complex q = xi / c.jacobian(x);
  return q * q + v(c.point(x)) - 1.0;
}

/// max Im p_theta over grid points with |x| >= 2R and |p(x, xi)| <= delta
/// (negative when the scaled symbol is elliptic there).
inline double scaled_symbol_margin(const ComplexPotential& v, const ScalingContour& c, double delta, double x_max,
                                   int samples = 201) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double x = 2.0 * c.radius + (x_max - 2.0 * c.radius) * i / (samples - 1);
    for (double sx : {-x, x}) {
      for (int j = 0; j < samples; ++j) {
        const double xi = -2.0 + 4.0 * j / (samples - 1);
        const Complex p = xi * xi + v(Complex(sx, 0.0)) - 1.0;
        if (std::abs(p) > delta) continue;
        worst = std::max(worst, scaled_symbol(v, c, sx, xi).imag());
      }
    }
  }
  return worst;
}

using SparseCMat = Eigen::SparseMatrix<Complex>;

struct ScaledOperator {
  Vec grid;            // interior nodes of [-L, L]
  SparseCMat matrix;   // complex symmetric
  double h = 0.0;
  double theta = 0.0;
  double radius = 0.0;
  double half_width = 0.0;  // L
  int points() const { return static_cast<int>(grid.size()); }
};

/// Minimum node count 8 L / (pi h).
inline int minimum_points(double half_width, double h) {
  return static_cast<int>(std::ceil(8.0 * half_width / (kPi * h)));
}

/// h^2 G^{-1/2} D^T C D G^{-1/2} + diag(V(x + i f) - 1) with Dirichlet ends:
/// D the fourth-order staggered derivative nodes -> midpoints, C = 1/g' at the
/// midpoints and G = diag(g') at the nodes. The similarity by G^{1/2} makes the
/// matrix complex symmetric without changing its spectrum.
inline ScaledOperator discretize_scaled(const ComplexPotential& v, const ScalingContour& c, double h,
                                        double half_width, int points) {
  if (!(h > 0.0)) throw InvalidArgument("discretize_scaled: h must be positive");
  if (!(half_width > 2.0 * c.radius)) throw InvalidArgument("discretize_scaled: need L > 2R");
  if (points < minimum_points(half_width, h)) {
    throw ResolutionError("discretize_scaled: Npts below 8 L/(pi h) = " + std::to_string(minimum_points(half_width, h)));
  }
  const int n = points;
  const double dx = 2.0 * half_width / (n + 1);
  ScaledOperator op;
  op.h = h;
  op.theta = c.theta;
  op.radius = c.radius;
  op.half_width = half_width;
  op.grid.resize(n);
  CVec g(n), gm(n + 1);
  for (int j = 0; j < n; ++j) {
    op.grid(j) = -half_width + (j + 1) * dx;
    g(j) = c.jacobian(op.grid(j));
  }
  for (int m = 0; m <= n; ++m) gm(m) = c.jacobian(-half_width + (m + 0.5) * dx);

  static constexpr double stencil[4] = {1.0 / 24, -27.0 / 24, 27.0 / 24, -1.0 / 24};
  std::vector<Eigen::Triplet<Complex>> dtrip;
  for (int m = 0; m <= n; ++m)
    for (int o = 0; o < 4; ++o) {
      const int j = m - 2 + o;
      if (j >= 0 && j < n) dtrip.emplace_back(m, j, stencil[o] / dx);
    }
  SparseCMat d(n + 1, n);
  d.setFromTriplets(dtrip.begin(), dtrip.end());
  const CVec cinv = gm.cwiseInverse();
  const CVec gsq = g.cwiseSqrt().cwiseInverse();
  SparseCMat k = SparseCMat(d.transpose()) * cinv.asDiagonal() * d;
  k = gsq.asDiagonal() * k * gsq.asDiagonal();
  k *= h * h;
  for (int j = 0; j < n; ++j) k.coeffRef(j, j) += v(c.point(op.grid(j))) - 1.0;
  k.makeCompressed();
  op.matrix = k;
  return op;
}

/// Eigenvalue near `shift` by shift-invert iteration with the complex-symmetric
/// Rayleigh quotient v^T A v / v^T v.
inline Complex refine_eigenvalue(const SparseCMat& a, Complex shift, int max_iter = 60, double tol = 1e-14) {
  const auto n = a.rows();
  SparseCMat id(n, n);
  id.setIdentity();
  Eigen::SparseLU<SparseCMat> lu;
  lu.compute(a - shift * id);
  if (lu.info() != Eigen::Success) throw InvalidArgument("refine_eigenvalue: factorization failed");
  CVec v = CVec::Ones(n);
  Complex lambda = shift;
  for (int it = 0; it < max_iter; ++it) {
    v = lu.solve(v);
    v /= v.norm();
    const CVec av = a * v;
    const Complex next = v.transpose() * av;
    const Complex denom = v.transpose() * v;
    const Complex rq = next / denom;
    if (std::abs(rq - lambda) < tol * std::max(1.0, std::abs(rq))) {
      lambda = rq;
      break;
    }
    lambda = rq;
  }
  return lambda;
}

struct DirectResonanceOptions {
  double half_width = 4.0;       // L
  double radius = 1.0;           // R
  int coarse_points = 700;       // dense eigensolve for candidates
  int fine_points = 3200;        // shift-invert refinement
  double stability_tol = 1e-6;   // max move between consecutive thetas
  double sector_margin = 0.05;   // keep arg(z + 1) > -2 theta + margin
};

struct DirectResonance {
  Complex z;
  double theta_shift = 0.0;  // max move across consecutive thetas
  bool near_sector = false;  // within 2 sector margins of arg(z + 1) = -2 theta
};

struct DirectResonanceList {
  SpectralWindow window;
  std::vector<DirectResonance> zeros;
  std::vector<double> thetas;
  int fine_points = 0;
  double half_width = 0.0;
};

/// Eigenvalues of the scaled operator in the window for one theta, refined on the fine grid.
inline std::vector<Complex> scaled_eigenvalues(const ComplexPotential& v, double h, const SpectralWindow& window,
                                               double theta, const DirectResonanceOptions& opt) {
  const ScalingContour c(theta, opt.radius);
  const auto coarse = discretize_scaled(v, c, h, opt.half_width, std::max(opt.coarse_points, minimum_points(opt.half_width, h)));
  const CVec ev = Eigen::ComplexEigenSolver<CMat>(CMat(coarse.matrix), false).eigenvalues();
  const auto fine = discretize_scaled(v, c, h, opt.half_width, opt.fine_points);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const Complex z = ev(i);
    if (!window.contains(z)) continue;
    if (std::arg(z + 1.0) <= -2.0 * theta + opt.sector_margin) continue;
    const Complex refined = refine_eigenvalue(fine.matrix, z + Complex(1e-7, 1e-7));
    if (window.contains(refined)) out.push_back(refined);
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  return out;
}

/// Eigenvalues of the scaled operators inside the window that move less than
/// the stability tolerance between consecutive thetas.
inline DirectResonanceList resonances_direct(const ComplexPotential& v, double h, const SpectralWindow& window,
                                             const std::vector<double>& thetas, const DirectResonanceOptions& opt = {}) {
  if (thetas.size() < 2) throw InvalidArgument("resonances_direct: need at least two angles");
  std::vector<std::vector<Complex>> per(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t t) { per[t] = scaled_eigenvalues(v, h, window, thetas[t], opt); });
  DirectResonanceList list;
  list.window = window;
  list.thetas = thetas;
  list.fine_points = opt.fine_points;
  list.half_width = opt.half_width;
  bool any = false;
  for (const auto& p : per) any = any || !p.empty();
  const double min_theta = *std::min_element(thetas.begin(), thetas.end());
  for (const Complex z : per.front()) {
    double shift = 0.0;
    Complex current = z;
    bool stable = true;
    for (std::size_t t = 1; t < per.size() && stable; ++t) {
      double best = std::numeric_limits<double>::infinity();
      Complex match = current;
      for (const Complex w : per[t])
        if (std::abs(w - current) < best) {
          best = std::abs(w - current);
          match = w;
        }
      stable = best < opt.stability_tol;
      shift = std::max(shift, best);
      current = match;
    }
    if (!stable) continue;
    const bool near = std::arg(z + 1.0) <= -2.0 * min_theta + 2.0 * opt.sector_margin;
    list.zeros.push_back({z, shift, near});
  }
  if (any && list.zeros.empty()) throw NoStableEigenvalues("resonances_direct: no eigenvalue is stable in theta");
  return list;
}

/// max |chi (P_theta - z)^{-1} chi - chi (P_0 - z)^{-1} chi| with chi the
/// indicator of |x| <= R; the two discretizations agree inside |x| <= R.
inline double cutoff_resolvent_difference(const ComplexPotential& v, double h, double theta, Complex z,
                                          double half_width, double radius, int points) {
  const auto scaled = discretize_scaled(v, ScalingContour(theta, radius), h, half_width, points);
  const auto plain = discretize_scaled(v, ScalingContour(0.0, radius), h, half_width, points);
  std::vector<int> inside;
  for (int j = 0; j < scaled.points(); ++j)
    if (std::abs(scaled.grid(j)) <= radius) inside.push_back(j);
  const auto n = scaled.points();
  SparseCMat id(n, n);
  id.setIdentity();
  auto cut_resolvent = [&](const SparseCMat& a) {
    Eigen::SparseLU<SparseCMat> lu;
    lu.compute(a - z * id);
    if (lu.info() != Eigen::Success) throw InvalidArgument("cutoff_resolvent_difference: singular at z");
    CMat rhs = CMat::Zero(n, static_cast<Eigen::Index>(inside.size()));
    for (std::size_t c = 0; c < inside.size(); ++c) rhs(inside[c], static_cast<Eigen::Index>(c)) = 1.0;
    const CMat sol = lu.solve(rhs);
    CMat out(static_cast<Eigen::Index>(inside.size()), static_cast<Eigen::Index>(inside.size()));
    for (std::size_t r = 0; r < inside.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = sol.row(inside[r]);
    return out;
  };
  return (cut_resolvent(scaled.matrix) - cut_resolvent(plain.matrix)).cwiseAbs().maxCoeff();
}

/// Smoothed barrier V0/2 (tanh((x + a)/w) - tanh((x - a)/w)), analytic near the real axis.
inline ComplexPotential smoothed_barrier(double v0, double a, double w) {
  return [v0, a, w](Complex x) { return 0.5 * v0 * (std::tanh((x + a) / w) - std::tanh((x - a) / w)); };
}

}  // namespace poincarezeta
