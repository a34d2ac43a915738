#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "poincarezeta/core/parallel.hpp"
#include "poincarezeta/phase_flow/integrator.hpp"

namespace poincarezeta {

/// Rescales xi along its own direction so that p(x, lambda xi) = energy (Newton in lambda).
/// Returns nullopt when the shell is not reachable along that ray.
template <SeparableHamiltonian H>
std::optional<PhasePoint> project_to_shell(const H& sys, const PhasePoint& rho, double energy,
                                           double tol = 1e-13) {
  if (rho.xi.norm() == 0.0) return std::nullopt;
  double lambda = 1.0;
  for (int it = 0; it < 60; ++it) {
    const Vec xi = lambda * rho.xi;
    const double f = sys.kinetic(xi) + sys.potential(rho.x) + sys.energy_shift() - energy;
    const double df = sys.kinetic_gradient(xi).dot(rho.xi);
    if (std::abs(f) <= tol) return PhasePoint(rho.x, xi);
    if (df == 0.0 || !std::isfinite(df)) return std::nullopt;
    double next = lambda - f / df;
    if (next <= 0.0) next = 0.5 * lambda;  // stay on the ray
    lambda = next;
  }
  const Vec xi = lambda * rho.xi;
  const double f = sys.kinetic(xi) + sys.potential(rho.x) + sys.energy_shift() - energy;
  if (std::abs(f) <= 1e-10) return PhasePoint(rho.x, xi);
  return std::nullopt;
}

namespace detail {

// Smallest tau in (0, |h|] with |x(step(tau))| >= radius, given that a full step crosses.
template <SeparableHamiltonian H>
double refine_exit(const H& sys, const Vec& x0, const Vec& xi0, double h, double radius) {
  double lo = 0.0, hi = std::abs(h);
  const double sgn = h < 0 ? -1.0 : 1.0;
  for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    Vec x = x0, xi = xi0;
    splitting_step(sys, x, xi, sgn * mid);
    if (x.norm() >= radius) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace detail

/// First t > 0 with max(|x(t)|, |x(-t)|) >= radius. Returns t_max when neither
/// direction leaves the ball by then (the non-escape marker).
template <SeparableHamiltonian H>
double escape_time(const H& sys, const PhasePoint& rho, double radius, double t_max, double dt) {
  if (radius < sys.interaction_radius()) {
    throw InvalidArgument("escape_time: radius below the interaction radius");
  }
  if (!(dt > 0.0)) throw InvalidArgument("escape_time: dt must be positive");
  if (rho.x.norm() >= radius) return 0.0;
  Vec xf = rho.x, xif = rho.xi, xb = rho.x, xib = rho.xi;
  double t = 0.0;
  while (t < t_max) {
    const double h = std::min(dt, t_max - t);
    const Vec xf0 = xf, xif0 = xif, xb0 = xb, xib0 = xib;
    splitting_step(sys, xf, xif, h);
    splitting_step(sys, xb, xib, -h);
    const bool out_f = xf.norm() >= radius;
    const bool out_b = xb.norm() >= radius;
    if (out_f || out_b) {
      double tau = h;
      if (out_f) tau = std::min(tau, detail::refine_exit(sys, xf0, xif0, h, radius));
      if (out_b) tau = std::min(tau, detail::refine_exit(sys, xb0, xib0, -h, radius));
      return t + tau;
    }
    t += h;
  }
  return t_max;
}

/// Phase-space sampling grid: positions on a uniform lattice of [-half_width, half_width]^n,
/// momentum directions on the unit sphere.
struct TrappedGrid {
  double half_width = 1.0;
  int points_per_axis = 21;
  int directions = 16;
  double escape_radius = 0.0;  // 0: use the system interaction radius
  double escape_cap = 0.0;     // 0: use the threshold itself

  std::string describe() const {
    return "box=" + std::to_string(half_width) + ";m=" + std::to_string(points_per_axis) +
           ";dirs=" + std::to_string(directions);
  }
};

struct TrappedSetSample {
  double energy = 0.0;
  double escape_threshold = 0.0;
  std::string grid_spec;
  std::vector<PhasePoint> points;
  std::vector<double> escape_times;
};

namespace detail {

inline std::vector<Vec> sphere_directions(Eigen::Index n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * kPi * (k + 0.5) / count;
      Vec d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
    return dirs;
  }
  // fixed-seed Gaussian directions for n >= 3
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  for (int k = 0; k < count; ++k) {
    Vec d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = g(rng);
    dirs.push_back(d.normalized());
  }
  return dirs;
}

}  // namespace detail

/// Grid points projected to p = energy whose escape time reaches t_threshold.
template <SeparableHamiltonian H>
TrappedSetSample sample_trapped_set(const H& sys, double energy, const TrappedGrid& grid,
                                    double t_threshold, double dt) {
  if (grid.points_per_axis < 1 || grid.directions < 1) {
    throw InvalidArgument("sample_trapped_set: empty grid");
  }
  const auto n = sys.dimension();
  const double radius = grid.escape_radius > 0.0 ? grid.escape_radius : sys.interaction_radius();
  const double cap = std::max(grid.escape_cap, t_threshold);
  const auto dirs = detail::sphere_directions(n, grid.directions);

  std::size_t lattice = 1;
  for (Eigen::Index j = 0; j < n; ++j) lattice *= static_cast<std::size_t>(grid.points_per_axis);
  const std::size_t total = lattice * dirs.size();

  std::vector<std::optional<std::pair<PhasePoint, double>>> slots(total);
  parallel_for(total, [&](std::size_t idx) {
    std::size_t cell = idx / dirs.size();
    const Vec& dir = dirs[idx % dirs.size()];
    Vec x(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const int m = grid.points_per_axis;
      const std::size_t k = cell % static_cast<std::size_t>(m);
      cell /= static_cast<std::size_t>(m);
      x(j) = m == 1 ? 0.0 : -grid.half_width + 2.0 * grid.half_width * static_cast<double>(k) / (m - 1);
    }
    if (x.norm() >= radius) return;
    const auto projected = project_to_shell(sys, PhasePoint(x, dir), energy);
    if (!projected) return;
    const double te = escape_time(sys, *projected, radius, cap, dt);
    if (te >= t_threshold) slots[idx].emplace(*projected, te);
  });

  TrappedSetSample sample;
  sample.energy = energy;
  sample.escape_threshold = t_threshold;
  sample.grid_spec = grid.describe();
  for (auto& s : slots) {
    if (!s) continue;
    sample.points.push_back(std::move(s->first));
    sample.escape_times.push_back(s->second);
  }
  if (sample.points.empty()) {
    throw EmptySample("sample_trapped_set: no grid point survives the escape threshold");
  }
  return sample;
}

/// Fraction of sample points that stay above the escape threshold after being
/// re-projected to energy + de (empirical stability of the trapped set in E).
template <SeparableHamiltonian H>
double trapped_fraction_retained(const H& sys, const TrappedSetSample& sample, double de,
                                 double dt, double radius = 0.0) {
  if (sample.points.empty()) return 0.0;
  const double r = radius > 0.0 ? radius : sys.interaction_radius();
  std::vector<char> kept(sample.points.size(), 0);
  parallel_for(sample.points.size(), [&](std::size_t i) {
    const auto moved = project_to_shell(sys, sample.points[i], sample.energy + de);
    if (!moved) return;
    kept[i] = escape_time(sys, *moved, r, sample.escape_threshold, dt) >= sample.escape_threshold;
  });
  return static_cast<double>(std::count(kept.begin(), kept.end(), 1)) /
         static_cast<double>(sample.points.size());
}

/// Orthonormal basis of the energy-shell tangent space modulo the flow direction:
/// the Euclidean complement of span{grad p, H_p} in R^{2n}.
template <SeparableHamiltonian H>
Mat transverse_basis(const H& sys, const PhasePoint& rho) {
  const auto n = sys.dimension();
  Mat span(2 * n, 2);
  span.col(0) = symbol_gradient(sys, rho);
  span.col(1) = hamilton_vector_field(sys, rho);
  Eigen::HouseholderQR<Mat> qr(span);
  const Mat q = qr.householderQ();
  return q.rightCols(2 * n - 2);
}

struct HyperbolicityEntry {
  double lambda = 0.0;           // late-window slope of log sigma_max(t)
  double power_exponent = 0.0;   // slope of log sigma_max against log t
  bool hyperbolic = false;
  std::vector<double> times;
  std::vector<double> sigma_max;
  std::vector<double> sigma_min;
};

namespace detail {

inline std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {slope, (sy - slope * sx) / m};
}

inline double fit_residual(const std::vector<double>& x, const std::vector<double>& y) {
  const auto [a, b] = line_fit(x, y);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r += std::pow(y[i] - a * x[i] - b, 2);
  return std::sqrt(r / static_cast<double>(x.size()));
}

}  // namespace detail

/// Growth of the linearized transverse flow at one point over s in [1, t]
/// (t < 0 runs the flow backward). The exponential model a*s + b and the
/// power model m*log(s) + b are both fitted to log sigma_max on [|t|/2, |t|];
/// the point is flagged hyperbolic when the exponential model fits better with a > 0.
template <SeparableHamiltonian H>
HyperbolicityEntry hyperbolicity_at(const H& sys, const PhasePoint& rho, double t, double dt,
                                    double sample_every = 0.05) {
  const double horizon = std::abs(t);
  if (horizon < 2.0) throw InvalidArgument("hyperbolicity_report: horizon must be >= 2");
  const double sgn = t < 0 ? -1.0 : 1.0;
  const auto n = sys.dimension();
  const Mat w0 = transverse_basis(sys, rho);
  Mat jac = Mat::Identity(2 * n, 2 * n);
  Vec x = rho.x, xi = rho.xi;
  HyperbolicityEntry entry;
  const long every = std::max(1L, std::lround(sample_every / dt));
  const long steps = step_count(horizon, dt);
  const double h = horizon / static_cast<double>(steps);
  for (long s = 1; s <= steps; ++s) {
    splitting_step(sys, x, xi, sgn * h, &jac);
    if (overflowed(x, xi)) throw StepOverflow("hyperbolicity_report: trajectory left the 1e9 box");
    const double time = h * static_cast<double>(s);
    if (time >= 1.0 - 1e-12 && (s % every == 0 || s == steps)) {
      const PhasePoint here(x, xi);
      const Mat reduced = transverse_basis(sys, here).transpose() * jac * w0;
      Eigen::JacobiSVD<Mat> svd(reduced);
      entry.times.push_back(time);
      entry.sigma_max.push_back(svd.singularValues()(0));
      entry.sigma_min.push_back(svd.singularValues()(svd.singularValues().size() - 1));
    }
  }
  std::vector<double> tt, lt, ls;
  for (std::size_t i = 0; i < entry.times.size(); ++i) {
    if (entry.times[i] < 0.5 * horizon) continue;
    tt.push_back(entry.times[i]);
    lt.push_back(std::log(entry.times[i]));
    ls.push_back(std::log(entry.sigma_max[i]));
  }
  entry.lambda = detail::line_fit(tt, ls).first;
  entry.power_exponent = detail::line_fit(lt, ls).first;
  entry.hyperbolic = entry.lambda > 0.0 && detail::fit_residual(tt, ls) < detail::fit_residual(lt, ls);
  return entry;
}

template <SeparableHamiltonian H>
std::vector<HyperbolicityEntry> hyperbolicity_report(const H& sys, const TrappedSetSample& sample,
                                                     double t, double dt) {
  std::vector<HyperbolicityEntry> out(sample.points.size());
  parallel_for(sample.points.size(),
               [&](std::size_t i) { out[i] = hyperbolicity_at(sys, sample.points[i], t, dt); });
  return out;
}

}  // namespace poincarezeta
