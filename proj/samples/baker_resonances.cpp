// Open baker with the middle third removed: the leading eigenvalues of the
// quantized map and the resonances of det(I - e^{izT/h} B) just below the axis.

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "poincarezeta.hpp"

using namespace poincarezeta;

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 81;
  const CMat b = open_baker(n, {0, 2}).block(0, 0);
  CVec ev = eigenvalues(b);
  std::sort(ev.data(), ev.data() + ev.size(), [](Complex a, Complex c) { return std::abs(a) > std::abs(c); });
  std::printf("N = %d, numerical rank %d\n", n, numerical_rank(b));
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, ev.size()); ++i)
    std::printf("  lambda %ld: % .6f %+.6fi  |lambda| = %.6f\n", static_cast<long>(i), ev(i).real(), ev(i).imag(),
                std::abs(ev(i)));

  const double h = torus_h(n);
  const SpectralWindow window{0.0, 2.0 * kPi * h * 0.999, -h * std::log(1.0 / 0.5), -1e-6};
  const auto list = find_resonances(constant_time_zeta(b, 1.0, h), window);
  std::printf("resonances with |lambda| > 0.5 in one period (h = %.3g): %zu\n", h, list.zeros.size());
  for (const auto& r : list.zeros) std::printf("  z = % .8f %+.8fi  (m = %d)\n", r.z.real(), r.z.imag(), r.multiplicity);
}
