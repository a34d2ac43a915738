#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "poincarezeta/poincare/section.hpp"

namespace poincarezeta {

struct ThreeBumpSectionInfo {
  int third = 0;   // bump on whose axis the section lies
  int toward = 0;  // bump the crossing orbit is heading to
};

/// The other two bumps of m, in increasing order.
inline std::pair<int, int> three_bump_pair(int m) {
  const int a = m % 3 + 1, b = (m + 1) % 3 + 1;
  return {std::min(a, b), std::max(a, b)};
}

/// Metadata of section k in three_bump_sections order.
inline ThreeBumpSectionInfo three_bump_section_info(int k) {
  const int m = k / 2 + 1;
  const auto [j, l] = three_bump_pair(m);
  return {m, k % 2 == 0 ? j : l};
}

/// Six sections: for each bump m, the segment of its axis between the other two
/// bumps, split by crossing direction. Coordinates are (u, eta) with u the
/// distance from the origin along -x_m and eta the momentum along the axis.
template <SeparableHamiltonian H>
std::vector<SectionChart> three_bump_sections(const H& sys, double energy, double u_lo = 0.2,
                                              double u_hi = 0.8, double eta_max = 0.6) {
  std::vector<SectionChart> charts;
  for (int k = 0; k < 6; ++k) {
    const auto info = three_bump_section_info(k);
    const Eigen::Vector2d a = -bump_centre(info.third);
    const Vec nu = Eigen::Vector2d(-a(1), a(0));
    // crossing toward `toward` means nu . xi has the sign of nu . x_toward
    const int orientation = nu.dot(Vec(bump_centre(info.toward))) > 0 ? 1 : -1;
    Vec lo(2), hi(2);
    lo << u_lo, -eta_max;
    hi << u_hi, eta_max;
    auto chart = hyperplane_section(sys, k, nu, 0.0, orientation, lo, hi, energy);
    // the tangent completion may point along +x_m; mirror the box in that case
    Vec probe = Vec::Zero(4);
    probe.head(2) = 0.5 * a;
    if (chart.inverse(PhasePoint(probe.head(2), probe.tail(2)))(0) < 0) {
      lo(0) = -u_hi;
      hi(0) = -u_lo;
      chart = hyperplane_section(sys, k, nu, 0.0, orientation, lo, hi, energy);
    }
    charts.push_back(std::move(chart));
  }
  return charts;
}

}  // namespace poincarezeta
