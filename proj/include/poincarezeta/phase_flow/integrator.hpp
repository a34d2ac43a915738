#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "poincarezeta/phase_flow/hamiltonian.hpp"

namespace poincarezeta {

/// Coordinates beyond this magnitude abort integration with StepOverflow.
inline constexpr double kOverflowBound = 1e9;

namespace detail {

// Fourth-order triple-jump composition of the drift-kick-drift leapfrog.
struct TripleJump {
  static constexpr double w1 = 1.3512071919596578;   // 1 / (2 - 2^{1/3})
  static constexpr double w0 = -1.7024143839193153;  // -2^{1/3} w1
  static constexpr std::array<double, 3> weights{w1, w0, w1};
};

template <SeparableHamiltonian H>
void leapfrog(const H& sys, Vec& x, Vec& xi, double h, Mat* jac) {
  const auto n = sys.dimension();
  auto drift = [&](double c) {
    if (jac) {
      jac->topRows(n) += c * sys.kinetic_hessian(xi) * jac->bottomRows(n);
    }
    x += c * sys.kinetic_gradient(xi);
  };
  drift(0.5 * h);
  if (jac) {
    jac->bottomRows(n) -= h * sys.potential_hessian(x) * jac->topRows(n);
  }
  xi -= h * sys.potential_gradient(x);
  drift(0.5 * h);
}

}  // namespace detail

/// One step of size h (any sign) of the 4th-order symplectic splitting scheme;
/// when jac is given it is advanced by the exact derivative of the step.
template <SeparableHamiltonian H>
void splitting_step(const H& sys, Vec& x, Vec& xi, double h, Mat* jac = nullptr) {
  for (double w : detail::TripleJump::weights) detail::leapfrog(sys, x, xi, w * h, jac);
}

inline bool overflowed(const Vec& x, const Vec& xi) {
  return !(x.cwiseAbs().maxCoeff() < kOverflowBound && xi.cwiseAbs().maxCoeff() < kOverflowBound);
}

/// Number of uniform steps used to cover |t| with step at most dt.
inline long step_count(double t, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("integrate_flow: dt must be positive");
  if (!std::isfinite(t)) throw InvalidArgument("integrate_flow: non-finite time");
  if (std::abs(t) / dt > 1e8) throw InvalidArgument("integrate_flow: |t|/dt exceeds 1e8");
  return static_cast<long>(std::ceil(std::abs(t) / dt - 1e-9));
}

struct TangentFrame {
  Mat jacobian;  // 2n x 2n
  PhasePoint end;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> points;
};

/// Phi^t(rho0) for t of either sign.
template <SeparableHamiltonian H>
PhasePoint integrate_flow(const H& sys, const PhasePoint& rho0, double t, double dt) {
  const long steps = step_count(t, dt);
  Vec x = rho0.x, xi = rho0.xi;
  if (steps == 0) return rho0;
  const double h = t / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    splitting_step(sys, x, xi, h);
    if (overflowed(x, xi)) throw StepOverflow("integrate_flow: trajectory left the 1e9 box");
  }
  return PhasePoint(x, xi);
}

/// Like integrate_flow, keeping every `stride`-th point (first and last always kept).
template <SeparableHamiltonian H>
Trajectory integrate_trajectory(const H& sys, const PhasePoint& rho0, double t, double dt,
                                long stride = 1) {
  const long steps = step_count(t, dt);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.points.push_back(rho0);
  if (steps == 0) return traj;
  const double h = t / static_cast<double>(steps);
  Vec x = rho0.x, xi = rho0.xi;
  for (long s = 1; s <= steps; ++s) {
    splitting_step(sys, x, xi, h);
    if (overflowed(x, xi)) throw StepOverflow("integrate_trajectory: trajectory left the 1e9 box");
    if (s % stride == 0 || s == steps) {
      traj.times.push_back(h * static_cast<double>(s));
      traj.points.emplace_back(x, xi);
    }
  }
  return traj;
}

/// Jacobian of Phi^t at rho0 via the variational equations of the scheme.
template <SeparableHamiltonian H>
TangentFrame tangent_flow(const H& sys, const PhasePoint& rho0, double t, double dt) {
  const long steps = step_count(t, dt);
  const auto n = sys.dimension();
  Mat jac = Mat::Identity(2 * n, 2 * n);
  Vec x = rho0.x, xi = rho0.xi;
  if (steps > 0) {
    const double h = t / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      splitting_step(sys, x, xi, h, &jac);
      if (overflowed(x, xi)) throw StepOverflow("tangent_flow: trajectory left the 1e9 box");
    }
  }
  return {jac, PhasePoint(x, xi)};
}

}  // namespace poincarezeta
