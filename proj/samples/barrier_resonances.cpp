// Shape resonances of a smoothed square barrier by complex scaling at three
// angles; only eigenvalues that do not move with the angle are kept.

#include <cstdio>

#include "poincarezeta.hpp"

using namespace poincarezeta;

int main() {
  const double h = 0.05;
  const auto v = smoothed_barrier(1.5, 0.5, 0.05);
  DirectResonanceOptions opt;
  opt.coarse_points = 500;
  opt.fine_points = 2400;
  const auto list = resonances_direct(v, h, {0.3, 0.8, -0.1, -1e-6}, {0.3, 0.4, 0.5}, opt);
  std::printf("h = %g, barrier V0 = 1.5, energy window [0.3, 0.8]\n", h);
  for (const auto& r : list.zeros)
    std::printf("  z = %.8f %+.8fi  theta shift %.1e%s\n", r.z.real(), r.z.imag(), r.theta_shift,
                r.near_sector ? "  (near the rotated continuum)" : "");
}
