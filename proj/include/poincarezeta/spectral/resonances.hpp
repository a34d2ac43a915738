#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "poincarezeta/core/parallel.hpp"
#include "poincarezeta/spectral/quadrature.hpp"
#include "poincarezeta/spectral/zeta.hpp"

namespace poincarezeta {

/// Rectangle [re_lo, re_hi] + i [im_lo, im_hi].
struct SpectralWindow {
  double re_lo = -1.0;
  double re_hi = 1.0;
  double im_lo = -1.0;
  double im_hi = 1.0;

  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  double diameter() const { return std::hypot(width(), height()); }
  bool contains(Complex z) const {
    return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi;
  }
};

/// [-delta, delta] + i [-M0 h log(1/h), M0 h log(1/h)].
inline SpectralWindow semiclassical_window(double delta, double m0, double h) {
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("semiclassical_window: need 0 < h < 1");
  const double y = m0 * h * std::log(1.0 / h);
  return {-delta, delta, -y, y};
}

/// zeta(z) and zeta'(z)/zeta(z).
struct ZetaSample {
  Complex value;
  Complex log_derivative;
};

using ZetaFunction = std::function<ZetaSample(Complex)>;

/// z -> (M(z), M'(z)).
using MapFamily = std::function<std::pair<CMat, CMat>(Complex)>;

/// zeta = det(I - M), zeta'/zeta = -tr((I - M)^{-1} M').
inline ZetaFunction zeta_of_family(MapFamily family) {
  return [family = std::move(family)](Complex z) {
    const auto [m, dm] = family(z);
    if (m.size() == 0) return ZetaSample{1.0, 0.0};
    Eigen::PartialPivLU<CMat> lu(CMat::Identity(m.rows(), m.cols()) - m);
    return ZetaSample{lu.determinant(), -lu.solve(dm).trace()};
  };
}

/// e^{i z T/h} M0 evaluated through the eigenvalues of M0:
/// zeta = prod_j (1 - e^{izT/h} lambda_j).
inline ZetaFunction constant_time_zeta(const CMat& m0, double t, double h) {
  const CVec ev = m0.size() ? Eigen::ComplexEigenSolver<CMat>(m0, false).eigenvalues() : CVec();
  return [ev, t, h](Complex z) {
    const Complex phase = std::exp(kI * z * t / h);
    Complex value = 1.0, logd = 0.0;
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      const Complex u = phase * ev(j);
      value *= 1.0 - u;
      logd += -(kI * t / h) * u / (1.0 - u);
    }
    return ZetaSample{value, logd};
  };
}

struct ResonanceGrid {
  int cells_re = 4;
  int cells_im = 2;
  int initial_order = 16;   // Gauss-Legendre nodes per edge, doubled until stable
  int max_order = 4096;
  double min_cell = 1e-7;   // relative to the window diameter; smaller cells stop splitting
  int max_jitter = 5;
};

struct Resonance {
  Complex z;
  int multiplicity = 1;
  double residual = 0.0;  // |zeta(z)| after Newton
};

struct ResonanceList {
  SpectralWindow window;          // as used (after any boundary jitter)
  std::vector<Resonance> zeros;   // sorted by (Re, Im)
  int boundary_count = 0;         // winding number of zeta on the outer boundary
  double boundary_max = 0.0;      // max |zeta| on the outer boundary nodes
  int total_multiplicity() const {
    int s = 0;
    for (const auto& r : zeros) s += r.multiplicity;
    return s;
  }
};

namespace detail {

struct EdgeResult {
  Complex integral;  // (1/2 pi i) int zeta'/zeta dz
  Complex moment;    // (1/2 pi i) int z zeta'/zeta dz
  double max_abs = 0.0;
};

inline EdgeResult edge_integral(const ZetaFunction& f, Complex a, Complex b, int q) {
  const auto& rule = gauss_legendre(q);
  const Complex half = 0.5 * (b - a), mid = 0.5 * (a + b);
  EdgeResult r{0.0, 0.0, 0.0};
  for (int i = 0; i < q; ++i) {
    const Complex z = mid + half * rule.nodes[static_cast<std::size_t>(i)];
    const ZetaSample s = f(z);
    const double mag = std::abs(s.value);
    if (!(mag >= 1e-12) || !std::isfinite(std::abs(s.log_derivative))) {
      throw BoundaryZero("find_resonances: zeta vanishes on a cell boundary");
    }
    r.max_abs = std::max(r.max_abs, mag);
    const Complex w = rule.weights[static_cast<std::size_t>(i)] * half / (2.0 * kPi * kI);
    r.integral += w * s.log_derivative;
    r.moment += w * z * s.log_derivative;
  }
  return r;
}

struct CellCount {
  int count = 0;
  Complex moment;
  double max_abs = 0.0;
};

// Argument-principle count on the rectangle, doubling the order until the
// value settles within 0.25 of an integer.
inline CellCount count_zeros(const ZetaFunction& f, const SpectralWindow& c, const ResonanceGrid& grid) {
  const Complex corners[4] = {{c.re_lo, c.im_lo}, {c.re_hi, c.im_lo}, {c.re_hi, c.im_hi}, {c.re_lo, c.im_hi}};
  auto total = [&](int q) {
    EdgeResult acc{0.0, 0.0, 0.0};
    for (int e = 0; e < 4; ++e) {
      const auto r = edge_integral(f, corners[e], corners[(e + 1) % 4], q);
      acc.integral += r.integral;
      acc.moment += r.moment;
      acc.max_abs = std::max(acc.max_abs, r.max_abs);
    }
    return acc;
  };
  int q = grid.initial_order;
  EdgeResult prev = total(q);
  while (q < grid.max_order) {
    q *= 2;
    const EdgeResult next = total(q);
    const double re = next.integral.real();
    if (std::abs(next.integral - prev.integral) < 0.05 && std::abs(re - std::round(re)) < 0.25 &&
        std::abs(next.integral.imag()) < 0.25) {
      return {static_cast<int>(std::lround(re)), next.moment, next.max_abs};
    }
    prev = next;
  }
  throw BoundaryZero("find_resonances: winding number did not stabilize");
}

inline Resonance newton_refine(const ZetaFunction& f, Complex z, int m, const SpectralWindow& cell) {
  const double scale = std::max(cell.width(), cell.height());
  for (int it = 0; it < 60; ++it) {
    const ZetaSample s = f(z);
    if (s.value == 0.0) break;
    const Complex step = static_cast<double>(m) / s.log_derivative;
    if (!std::isfinite(std::abs(step)) || std::abs(step) > scale) break;
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return {z, m, std::abs(f(z).value)};
}

inline void split_cells(const ZetaFunction& f, const SpectralWindow& cell, int count, Complex moment,
                        const ResonanceGrid& grid, double min_size, std::vector<Resonance>& out) {
  if (count <= 0) return;
  const bool tiny = std::max(cell.width(), cell.height()) < min_size;
  if (count == 1 || tiny) {
    out.push_back(newton_refine(f, moment / static_cast<double>(count), count, cell));
    return;
  }
  for (int attempt = 0; attempt <= grid.max_jitter; ++attempt) {
    const double shift = attempt == 0 ? 0.0 : 0.037 * attempt * (attempt % 2 ? 1.0 : -1.0);
    const double xm = cell.re_lo + (0.5 + shift) * cell.width();
    const double ym = cell.im_lo + (0.5 - shift) * cell.height();
    const SpectralWindow kids[4] = {{cell.re_lo, xm, cell.im_lo, ym},
                                    {xm, cell.re_hi, cell.im_lo, ym},
                                    {cell.re_lo, xm, ym, cell.im_hi},
                                    {xm, cell.re_hi, ym, cell.im_hi}};
    CellCount counts[4];
    try {
      int sum = 0;
      for (int k = 0; k < 4; ++k) {
        counts[k] = count_zeros(f, kids[k], grid);
        sum += counts[k].count;
      }
      if (sum != count) continue;  // child counts must add up to the parent
    } catch (const BoundaryZero&) {
      continue;
    }
    for (int k = 0; k < 4; ++k) split_cells(f, kids[k], counts[k].count, counts[k].moment, grid, min_size, out);
    return;
  }
  // zeta is too small on every trial split: a multiple zero (or a cluster
  // below the resolution of the boundary test) sits inside
  out.push_back(newton_refine(f, moment / static_cast<double>(count), count, cell));
}

}  // namespace detail

/// Zeros of zeta in the window with multiplicities (argument principle on a
/// cell grid, then Newton with multiplicity-aware steps).
inline ResonanceList find_resonances(const ZetaFunction& f, SpectralWindow window, const ResonanceGrid& grid = {}) {
  if (!(window.width() > 0.0 && window.height() > 0.0)) throw InvalidArgument("find_resonances: empty window");
  if (grid.cells_re < 1 || grid.cells_im < 1 || grid.initial_order < 2) {
    throw InvalidArgument("find_resonances: bad grid specification");
  }
  ResonanceList list;
  const SpectralWindow original = window;
  for (int attempt = 0;; ++attempt) {
    try {
      const auto outer = detail::count_zeros(f, window, grid);
      list.boundary_count = outer.count;
      list.boundary_max = outer.max_abs;
      break;
    } catch (const BoundaryZero&) {
      if (attempt >= grid.max_jitter) throw;
      const double e = 1e-2 * (attempt + 1);
      window = {original.re_lo - e * original.width(), original.re_hi + e * original.width(),
                original.im_lo - e * original.height(), original.im_hi + e * original.height()};
    }
  }
  list.window = window;
  const double min_size = grid.min_cell * window.diameter();

  for (int attempt = 0; attempt <= grid.max_jitter; ++attempt) {
    const double shift = attempt == 0 ? 0.0 : 0.029 * attempt;
    const int nx = grid.cells_re, ny = grid.cells_im;
    auto line = [&](double lo, double hi, int cells, int k) {
      if (k == 0) return lo;
      if (k == cells) return hi;
      return lo + (hi - lo) * (k + shift) / cells;
    };
    std::vector<SpectralWindow> cells;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        cells.push_back({line(window.re_lo, window.re_hi, nx, i), line(window.re_lo, window.re_hi, nx, i + 1),
                         line(window.im_lo, window.im_hi, ny, j), line(window.im_lo, window.im_hi, ny, j + 1)});
    std::vector<std::vector<Resonance>> found(cells.size());
    std::vector<int> counts(cells.size(), 0);
    bool failed = false;
    try {
      parallel_for(cells.size(), [&](std::size_t c) {
        const auto cc = detail::count_zeros(f, cells[c], grid);
        counts[c] = cc.count;
        detail::split_cells(f, cells[c], cc.count, cc.moment, grid, min_size, found[c]);
      });
    } catch (const BoundaryZero&) {
      failed = true;
    }
    int sum = 0;
    for (int c : counts) sum += c;
    if (failed || sum != list.boundary_count) continue;
    list.zeros.clear();
    for (auto& v : found) list.zeros.insert(list.zeros.end(), v.begin(), v.end());
    std::sort(list.zeros.begin(), list.zeros.end(), [](const Resonance& a, const Resonance& b) {
      return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    return list;
  }
  throw BoundaryZero("find_resonances: grid counts never matched the boundary winding number");
}

/// Matrix-family entry point.
inline ResonanceList find_resonances(const MapFamily& family, const SpectralWindow& window,
                                     const ResonanceGrid& grid = {}) {
  return find_resonances(zeta_of_family(family), window, grid);
}

}  // namespace poincarezeta
