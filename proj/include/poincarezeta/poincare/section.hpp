#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "poincarezeta/phase_flow/hamiltonian.hpp"

namespace poincarezeta {

/// One component Sigma_k of a Poincare section inside the shell p = energy,
/// with a chart kappa_k from a box in R^{2(n-1)} and a defining function s_k.
///
/// The chart is type-erased so that sections over any SeparableHamiltonian can
/// be mixed in one atlas.
struct SectionChart {
  int index = 0;
  Eigen::Index phase_dim = 0;  // n
  double energy = 0.0;
  Vec box_lo;  // chart domain box in R^{2(n-1)}
  Vec box_hi;

  std::function<std::optional<PhasePoint>(const Vec&)> chart;
  std::function<Vec(const PhasePoint&)> inverse;
  std::function<double(const PhasePoint&)> defining;
  std::function<Vec(const PhasePoint&)> defining_gradient;  // d s_k in R^{2n}
  std::function<double(const PhasePoint&)> crossing_speed;  // H_p s_k
  std::function<int()> orientation;                         // required sign of H_p s_k
  std::function<Mat(const Vec&)> chart_jacobian;            // 2n x 2(n-1)
  std::function<Mat(const PhasePoint&)> inverse_jacobian;   // 2(n-1) x 2n
  std::function<SectionChart(double)> at_energy;

  Eigen::Index section_dim() const { return 2 * (phase_dim - 1); }

  bool in_box(const Vec& coords, double slack = 1e-9) const {
    return (coords.array() >= box_lo.array() - slack).all() && (coords.array() <= box_hi.array() + slack).all();
  }

  /// A crossing of {s_k = 0} counts as a hit of this component when H_p s_k has
  /// the component's orientation and the chart coordinates fall in the box.
  bool accepts(const PhasePoint& rho) const {
    const double speed = crossing_speed(rho);
    if (speed == 0.0 || (speed > 0) != (orientation() > 0)) return false;
    return in_box(inverse(rho));
  }
};

/// Section {nu . x = offset} oriented by sign(H_p s) = orientation, with chart
/// coordinates u = T^T (x - offset nu), eta = T^T xi for an orthonormal
/// completion T of nu. The normal momentum is solved from p = energy by Newton.
template <SeparableHamiltonian H>
SectionChart hyperplane_section(const H& sys, int index, const Vec& normal, double offset,
                                int orientation, const Vec& box_lo, const Vec& box_hi,
                                double energy) {
  const auto n = sys.dimension();
  if (normal.size() != n) throw DimensionError("hyperplane_section: normal has wrong dimension");
  if (n < 2) throw DimensionError("hyperplane_section: need n >= 2");
  if (box_lo.size() != 2 * (n - 1) || box_hi.size() != 2 * (n - 1)) {
    throw DimensionError("hyperplane_section: box must live in R^{2(n-1)}");
  }
  if (orientation != 1 && orientation != -1) {
    throw InvalidArgument("hyperplane_section: orientation must be +1 or -1");
  }
  const Vec nu = normal.normalized();
  Mat basis = Mat::Identity(n, n);
  basis.col(0) = nu;
  Eigen::HouseholderQR<Mat> qr(basis);
  Mat q = qr.householderQ();
  if (q.col(0).dot(nu) < 0) q = -q;
  const Mat tangent = q.rightCols(n - 1);

  SectionChart c;
  c.index = index;
  c.phase_dim = n;
  c.energy = energy;
  c.box_lo = box_lo;
  c.box_hi = box_hi;

  c.chart = [sys, nu, offset, tangent, orientation, energy, n](const Vec& coords) -> std::optional<PhasePoint> {
    const Vec u = coords.head(n - 1), eta = coords.tail(n - 1);
    const Vec x = offset * nu + tangent * u;
    const double v = sys.potential(x) + sys.energy_shift() - energy;
    double s = static_cast<double>(orientation);
    for (int it = 0; it < 80; ++it) {
      const Vec xi = tangent * eta + s * nu;
      const double g = sys.kinetic(xi) + v;
      const double dg = sys.kinetic_gradient(xi).dot(nu);
      if (std::abs(g) < 1e-15) break;
      if (dg == 0.0) return std::nullopt;
      s -= g / dg;
      if (!std::isfinite(s)) return std::nullopt;
    }
    const Vec xi = tangent * eta + s * nu;
    if (std::abs(sys.kinetic(xi) + v) > 1e-12) return std::nullopt;
    const double speed = sys.kinetic_gradient(xi).dot(nu);
    if (speed == 0.0 || (speed > 0) != (orientation > 0)) return std::nullopt;
    return PhasePoint(x, xi);
  };
  c.inverse = [nu, offset, tangent, n](const PhasePoint& rho) {
    Vec coords(2 * (n - 1));
    coords << tangent.transpose() * (rho.x - offset * nu), tangent.transpose() * rho.xi;
    return coords;
  };
  c.defining = [nu, offset](const PhasePoint& rho) { return nu.dot(rho.x) - offset; };
  c.defining_gradient = [nu, n](const PhasePoint&) {
    Vec g = Vec::Zero(2 * n);
    g.head(n) = nu;
    return g;
  };
  c.crossing_speed = [sys, nu](const PhasePoint& rho) { return sys.kinetic_gradient(rho.xi).dot(nu); };
  c.orientation = [orientation] { return orientation; };
  c.chart_jacobian = [sys, nu, tangent, n, chart = c.chart](const Vec& coords) {
    const auto rho = chart(coords);
    if (!rho) throw InvalidArgument("chart_jacobian: coordinates off the energy shell");
    const auto d = n - 1;
    const Vec gx = sys.potential_gradient(rho->x);
    const Vec gxi = sys.kinetic_gradient(rho->xi);
    const double denom = gxi.dot(nu);
    Mat jac = Mat::Zero(2 * n, 2 * d);
    jac.topLeftCorner(n, d) = tangent;
    // d xi_nu from implicit differentiation of p = energy
    const Eigen::RowVectorXd dnu_du = -(gx.transpose() * tangent) / denom;
    const Eigen::RowVectorXd dnu_deta = -(gxi.transpose() * tangent) / denom;
    jac.bottomLeftCorner(n, d) = nu * dnu_du;
    jac.bottomRightCorner(n, d) = tangent + nu * dnu_deta;
    return jac;
  };
  c.inverse_jacobian = [tangent, n](const PhasePoint&) {
    const auto d = n - 1;
    Mat jac = Mat::Zero(2 * d, 2 * n);
    jac.topLeftCorner(d, n) = tangent.transpose();
    jac.bottomRightCorner(d, n) = tangent.transpose();
    return jac;
  };
  c.at_energy = [sys, index, nu, offset, orientation, box_lo, box_hi](double z) {
    return hyperplane_section(sys, index, nu, offset, orientation, box_lo, box_hi, z);
  };
  return c;
}

/// Chart of Sigma_k(z): the same section pushed to the shell p = z.
inline SectionChart energy_deformed_section(const SectionChart& chart, double z, double delta = 0.1) {
  if (std::abs(z) > delta) throw InvalidArgument("energy_deformed_section: |z| exceeds delta");
  return chart.at_energy(z);
}

struct ChartDiagnostics {
  double min_transversality = std::numeric_limits<double>::infinity();  // min |H_p s_k|
  double max_roundtrip_error = 0.0;  // |kappa^{-1}(kappa(c)) - c|
  int reachable = 0;                 // grid points on the shell
  int sampled = 0;
};

/// Samples an m^{2(n-1)} grid of the chart box and measures transversality
/// and chart/inverse consistency.
inline ChartDiagnostics validate_chart(const SectionChart& chart, int m = 11) {
  ChartDiagnostics d;
  const auto dim = chart.section_dim();
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  long total = 1;
  for (Eigen::Index j = 0; j < dim; ++j) total *= m;
  for (long flat = 0; flat < total; ++flat) {
    long r = flat;
    Vec c(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const int k = static_cast<int>(r % m);
      r /= m;
      c(j) = chart.box_lo(j) + (chart.box_hi(j) - chart.box_lo(j)) * (m == 1 ? 0.5 : double(k) / (m - 1));
    }
    ++d.sampled;
    const auto rho = chart.chart(c);
    if (!rho) continue;
    ++d.reachable;
    d.min_transversality = std::min(d.min_transversality, std::abs(chart.crossing_speed(*rho)));
    d.max_roundtrip_error = std::max(d.max_roundtrip_error, (chart.inverse(*rho) - c).norm());
  }
  return d;
}

/// Smallest sampled distance between the ranges of two charts (eq. H1-type
/// disjointness), measured in T*R^n.
inline double chart_separation(const SectionChart& a, const SectionChart& b, int m = 9) {
  auto sample = [m](const SectionChart& c) {
    std::vector<Vec> pts;
    const auto dim = c.section_dim();
    long total = 1;
    for (Eigen::Index j = 0; j < dim; ++j) total *= m;
    for (long flat = 0; flat < total; ++flat) {
      long r = flat;
      Vec v(dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        const int k = static_cast<int>(r % m);
        r /= m;
        v(j) = c.box_lo(j) + (c.box_hi(j) - c.box_lo(j)) * (m == 1 ? 0.5 : double(k) / (m - 1));
      }
      if (auto rho = c.chart(v)) pts.push_back(rho->stacked());
    }
    return pts;
  };
  const auto pa = sample(a), pb = sample(b);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pa)
    for (const auto& q : pb) best = std::min(best, (p - q).norm());
  return best;
}

}  // namespace poincarezeta
