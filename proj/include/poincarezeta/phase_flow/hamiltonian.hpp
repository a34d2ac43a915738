#pragma once

#include <concepts>
#include <functional>
#include <limits>
#include <random>
#include <utility>

#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// A Hamiltonian p(x, xi) = T(xi) + V(x) + shift, the class the splitting
/// integrator handles exactly step by step.
template <class H>
concept SeparableHamiltonian = requires(const H& h, const Vec& v) {
  { h.dimension() } -> std::convertible_to<Eigen::Index>;
  { h.kinetic(v) } -> std::convertible_to<double>;
  { h.kinetic_gradient(v) } -> std::convertible_to<Vec>;
  { h.kinetic_hessian(v) } -> std::convertible_to<Mat>;
  { h.potential(v) } -> std::convertible_to<double>;
  { h.potential_gradient(v) } -> std::convertible_to<Vec>;
  { h.potential_hessian(v) } -> std::convertible_to<Mat>;
  { h.energy_shift() } -> std::convertible_to<double>;
  { h.interaction_radius() } -> std::convertible_to<double>;
};

template <SeparableHamiltonian H>
double symbol(const H& sys, const PhasePoint& rho) {
  return sys.kinetic(rho.xi) + sys.potential(rho.x) + sys.energy_shift();
}

/// Full gradient (d_x p, d_xi p) in R^{2n}.
template <SeparableHamiltonian H>
Vec symbol_gradient(const H& sys, const PhasePoint& rho) {
  const auto n = sys.dimension();
  Vec g(2 * n);
  g << sys.potential_gradient(rho.x), sys.kinetic_gradient(rho.xi);
  return g;
}

/// H_p = (d_xi p, -d_x p).
template <SeparableHamiltonian H>
Vec hamilton_vector_field(const H& sys, const PhasePoint& rho) {
  const auto n = sys.dimension();
  Vec v(2 * n);
  v << sys.kinetic_gradient(rho.xi), -sys.potential_gradient(rho.x);
  return v;
}

using ScalarField = std::function<double(const Vec&)>;
using GradientField = std::function<Vec(const Vec&)>;
using HessianField = std::function<Mat(const Vec&)>;

/// p(x, xi) = |xi|^2 + V(x) - 1 on T*R^n. Motion obeys x' = 2 xi.
class SchrodingerSystem {
 public:
  SchrodingerSystem(Eigen::Index n, ScalarField v, GradientField grad_v, HessianField hess_v,
                    double interaction_radius)
      : n_(n),
        v_(std::move(v)),
        grad_v_(std::move(grad_v)),
        hess_v_(std::move(hess_v)),
        radius_(interaction_radius) {
    if (n_ < 1) throw DimensionError("SchrodingerSystem: dimension must be positive");
    if (!(radius_ > 0.0)) throw InvalidArgument("SchrodingerSystem: interaction radius must be > 0");
    if (!hess_v_) {
      // central differences of the gradient
      hess_v_ = [g = grad_v_, n](const Vec& x) {
        constexpr double step = 1e-5;
        Mat hess(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
          Vec xp = x, xm = x;
          xp(j) += step;
          xm(j) -= step;
          hess.col(j) = (g(xp) - g(xm)) / (2.0 * step);
        }
        return Mat((hess + hess.transpose()) / 2.0);
      };
    }
  }

  Eigen::Index dimension() const { return n_; }
  double kinetic(const Vec& xi) const { return xi.squaredNorm(); }
  Vec kinetic_gradient(const Vec& xi) const { return 2.0 * xi; }
  Mat kinetic_hessian(const Vec&) const { return 2.0 * Mat::Identity(n_, n_); }
  double potential(const Vec& x) const { return v_(x); }
  Vec potential_gradient(const Vec& x) const { return grad_v_(x); }
  Mat potential_hessian(const Vec& x) const { return hess_v_(x); }
  double energy_shift() const { return -1.0; }
  double interaction_radius() const { return radius_; }

 private:
  Eigen::Index n_;
  ScalarField v_;
  GradientField grad_v_;
  HessianField hess_v_;
  double radius_;
};

/// Normal form p = xi_n (no potential, no shift): the flow is translation in x_n.
class NormalFormSystem {
 public:
  explicit NormalFormSystem(Eigen::Index n) : n_(n) {
    if (n_ < 1) throw DimensionError("NormalFormSystem: dimension must be positive");
  }

  Eigen::Index dimension() const { return n_; }
  double kinetic(const Vec& xi) const { return xi(n_ - 1); }
  Vec kinetic_gradient(const Vec&) const { return Vec::Unit(n_, n_ - 1); }
  Mat kinetic_hessian(const Vec&) const { return Mat::Zero(n_, n_); }
  double potential(const Vec&) const { return 0.0; }
  Vec potential_gradient(const Vec&) const { return Vec::Zero(n_); }
  Mat potential_hessian(const Vec&) const { return Mat::Zero(n_, n_); }
  double energy_shift() const { return 0.0; }
  double interaction_radius() const { return std::numeric_limits<double>::infinity(); }

 private:
  Eigen::Index n_;
};

static_assert(SeparableHamiltonian<SchrodingerSystem>);
static_assert(SeparableHamiltonian<NormalFormSystem>);

inline SchrodingerSystem free_system(Eigen::Index n, double radius = 1.0) {
  return SchrodingerSystem(
      n, [](const Vec&) { return 0.0; }, [n](const Vec&) { return Vec(Vec::Zero(n)); },
      [n](const Vec&) { return Mat(Mat::Zero(n, n)); }, radius);
}

/// Centres of the three bumps: (cos(2 pi k/3), sin(2 pi k/3)), k = 1, 2, 3.
inline Eigen::Vector2d bump_centre(int k) {
  const double a = 2.0 * kPi * k / 3.0;
  return {std::cos(a), std::sin(a)};
}

/// V(x) = 2 sum_k exp(-R |x - x_k|^2) on R^2.
inline SchrodingerSystem three_bump(double sharpness) {
  if (!(sharpness > 0.0)) throw InvalidArgument("three_bump: sharpness must be > 0");
  const double r = sharpness;
  auto v = [r](const Vec& x) {
    double s = 0.0;
    for (int k = 1; k <= 3; ++k) s += 2.0 * std::exp(-r * (x - bump_centre(k)).squaredNorm());
    return s;
  };
  auto grad = [r](const Vec& x) {
    Vec g = Vec::Zero(2);
    for (int k = 1; k <= 3; ++k) {
      const Vec d = x - bump_centre(k);
      g += -4.0 * r * std::exp(-r * d.squaredNorm()) * d;
    }
    return g;
  };
  auto hess = [r](const Vec& x) {
    Mat hm = Mat::Zero(2, 2);
    for (int k = 1; k <= 3; ++k) {
      const Vec d = x - bump_centre(k);
      const double e = 2.0 * std::exp(-r * d.squaredNorm());
      hm += e * (4.0 * r * r * d * d.transpose() - 2.0 * r * Mat::Identity(2, 2));
    }
    return hm;
  };
  // V < 1e-12 outside this radius
  const double radius = 1.0 + std::sqrt(std::log(6e12) / r);
  return SchrodingerSystem(2, v, grad, hess, radius);
}

/// Worst relative mismatch between gradV and central differences of V at
/// random points of the ball of radius `box`.
inline double gradient_consistency(const SchrodingerSystem& sys, double box, int samples = 32,
                                   unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  const auto n = sys.dimension();
  double worst = 0.0;
  constexpr double step = 1e-6;
  for (int s = 0; s < samples; ++s) {
    Vec x(n);
    for (Eigen::Index j = 0; j < n; ++j) x(j) = u(rng);
    const Vec g = sys.potential_gradient(x);
    Vec fd(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      fd(j) = (sys.potential(xp) - sys.potential(xm)) / (2.0 * step);
    }
    const double scale = std::max(g.norm(), 1e-3);
    worst = std::max(worst, (g - fd).norm() / scale);
  }
  return worst;
}

}  // namespace poincarezeta
