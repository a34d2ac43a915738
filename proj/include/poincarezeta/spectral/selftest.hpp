#pragma once

#include <algorithm>
#include <random>

#include "poincarezeta/spectral/grushin.hpp"

namespace poincarezeta {

/// Complex Gaussian n x m matrix.
inline CMat random_gaussian(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::normal_distribution<double> g;
  CMat a(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

/// P = G + 2 sqrt(n) I (invertible with high probability) and Gaussian
/// borders with `rows_plus` rows and `cols_minus` columns.
inline GrushinSystem random_grushin_system(std::mt19937_64& rng, int n, int cols_minus, int rows_plus) {
  CMat p = random_gaussian(rng, n, n) + 2.0 * std::sqrt(static_cast<double>(n)) * CMat::Identity(n, n);
  return GrushinSystem(std::move(p), random_gaussian(rng, n, cols_minus), random_gaussian(rng, rows_plus, n));
}

struct GrushinSelftest {
  int schur_trials = 0, schur_passed = 0;
  double schur_worst = 0.0;
  int index_trials = 0, index_passed = 0;
  int trace_trials = 0, trace_passed = 0;
};

/// Randomized Schur-identity, index and trace-formula suites.
inline GrushinSelftest grushin_selftest(unsigned long seed, int schur_trials = 200, int index_trials = 100,
                                        int trace_trials = 50, double tol = 1e-10) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(5, 40), border(1, 5);
  GrushinSelftest out;
  for (int t = 0; t < schur_trials; ++t) {
    const int n = size(rng), m = border(rng);
    const auto rep = verify_schur_identities(random_grushin_system(rng, n, m, m));
    const double worst = std::max(rep.inverse_identity, rep.effective_identity);
    out.schur_worst = std::max(out.schur_worst, worst);
    ++out.schur_trials;
    if (worst <= tol) ++out.schur_passed;
  }
  for (int t = 0; t < index_trials; ++t) {
    const int n = size(rng), m = border(rng), mp = border(rng);
    const auto rep = index_check(random_grushin_system(rng, n, m, mp));
    ++out.index_trials;
    if (rep.bordered == rep.schur && rep.bordered == m - mp) ++out.index_passed;
  }
  const CircleContour contour{Complex(0.1, -0.2), 0.5};
  for (int t = 0; t < trace_trials; ++t) {
    const auto pencil = well_posed_pencil(rng, 5 + t % 20, contour);
    const auto r = verify_trace_formula(pencil, contour);
    ++out.trace_trials;
    if (r.lhs == r.rhs) ++out.trace_passed;
  }
  return out;
}

}  // namespace poincarezeta
