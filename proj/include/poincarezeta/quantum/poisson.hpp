#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// A 0 -> 1 step profile chi_0(x_n).
using StepProfile = std::function<double(double)>;

/// C-infinity step from 0 at x = c - w/2 to 1 at x = c + w/2, built from exp(-1/t).
inline StepProfile smooth_step(double centre, double width) {
  return [centre, width](double x) {
    const double t = (x - centre) / width + 0.5;
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  };
}

/// (1 + erf((x - c)/w))/2.
inline StepProfile erf_step(double centre, double width) {
  return [centre, width](double x) { return 0.5 * (1.0 + std::erf((x - centre) / width)); };
}

struct PoissonGrid {
  int transverse_points = 32;   // x' samples on [0, 1)
  int normal_points = 4000;     // x_n samples on [lo, hi]
  double lo = -1.0;
  double hi = 1.0;
};

/// < (i/h)[h D_{x_n}, chi_0] K(z) v, K(conj z) v > / ||v||^2 with
/// K(z) v(x', x_n) = exp(i x_n z / h) v(x'), the commutator taken with the
/// discrete sixth-order central derivative on a uniform 2D grid.
inline Complex poisson_normalization_check(const PoissonGrid& grid, double h, Complex z, const StepProfile& chi0,
                                           const std::function<Complex(double)>& v) {
  if (grid.normal_points < 16 || grid.transverse_points < 1 || !(grid.hi > grid.lo)) {
    throw InvalidArgument("poisson_normalization_check: grid too small");
  }
  if (!(h > 0.0)) throw InvalidArgument("poisson_normalization_check: h must be positive");
  const int n = grid.normal_points;
  const double dx = (grid.hi - grid.lo) / (n - 1);
  static constexpr std::array<double, 3> c{45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
  std::vector<Complex> u(n), cu(n);
  std::vector<double> chi(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.lo + j * dx;
    u[j] = std::exp(kI * x * z / h);
    chi[j] = chi0(x);
    cu[j] = chi[j] * u[j];
  }
  auto deriv = [&](const std::vector<Complex>& f, int j) {
    Complex d = 0.0;
    for (int s = 1; s <= 3; ++s) d += c[s - 1] * (f[j + s] - f[j - s]);
    return d / dx;
  };
  // (i/h)[h D, chi] = (i/h)(h/i)(d(chi u) - chi du) = d(chi u) - chi du
  Complex normal = 0.0;
  for (int j = 3; j < n - 3; ++j) {
    const Complex comm = deriv(cu, j) - chi[j] * deriv(u, j);
    const double x = grid.lo + j * dx;
    normal += comm * std::conj(std::exp(kI * x * std::conj(z) / h)) * dx;
  }
  double vnorm = 0.0;
  Complex transverse = 0.0;
  for (int j = 0; j < grid.transverse_points; ++j) {
    const Complex vj = v((j + 0.5) / grid.transverse_points);
    transverse += vj * std::conj(vj);
    vnorm += std::norm(vj);
  }
  if (vnorm == 0.0) throw InvalidArgument("poisson_normalization_check: v vanishes on the grid");
  return normal * transverse / vnorm;
}

}  // namespace poincarezeta
