#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "poincarezeta/poincare/return_map.hpp"
#include "poincarezeta/quantum/open_map.hpp"
#include "poincarezeta/quantum/torus.hpp"

namespace poincarezeta {

/// Mixed generating function S(q_out, q_in) of one return map F_ik on
/// one-dimensional section positions: p_in = -dS/dq_in, p_out = dS/dq_out.
/// Missing derivatives fall back to central differences.
struct GeneratingFunction {
  std::function<double(double, double)> s;
  std::function<double(double, double)> ds_dout;
  std::function<double(double, double)> ds_din;
  std::function<double(double, double)> d2s;  // d^2 S / dq_out dq_in

  double value(double qo, double qi) const { return s(qo, qi); }

  double d_out(double qo, double qi) const {
    if (ds_dout) return ds_dout(qo, qi);
    constexpr double e = 1e-6;
    return (s(qo + e, qi) - s(qo - e, qi)) / (2 * e);
  }

  double d_in(double qo, double qi) const {
    if (ds_din) return ds_din(qo, qi);
    constexpr double e = 1e-6;
    return (s(qo, qi + e) - s(qo, qi - e)) / (2 * e);
  }

  double mixed(double qo, double qi) const {
    if (d2s) return d2s(qo, qi);
    constexpr double e = 1e-4;
    return (s(qo + e, qi + e) - s(qo + e, qi - e) - s(qo - e, qi + e) + s(qo - e, qi - e)) / (4 * e * e);
  }
};

/// Uniform quadrature grid on a position interval with a cosine taper of
/// relative width `taper` at both ends.
struct TransferWindow {
  double lo = 0.0;
  double hi = 1.0;
  int points = 64;
  double taper = 0.2;

  double step() const { return (hi - lo) / points; }
  double node(int j) const { return lo + (j + 0.5) * step(); }
  double weight(int j) const { return cosine_taper((j + 0.5) / points, taper); }
};

struct TransferBlockSpec {
  int from = 0;  // k
  int to = 0;    // i
  GeneratingFunction generating;
};

struct ConsistencyReport {
  double max_p_in_error = 0.0;
  double max_p_out_error = 0.0;
  std::size_t checked = 0;
};

/// Compares -dS/dq_in and dS/dq_out with the sampled return map: for each
/// record k -> i inside both windows, (q, p) are chart coordinates (u, eta).
inline ConsistencyReport generating_function_consistency(const ReturnMapAtlas& atlas,
                                                         const std::vector<TransferBlockSpec>& blocks,
                                                         const std::vector<TransferWindow>& windows) {
  ConsistencyReport rep;
  for (const auto& r : atlas.records) {
    if (r.rho_in.size() != 2) throw DimensionError("bogomolny_transfer: sections must be two-dimensional");
    for (const auto& b : blocks) {
      if (b.from != r.from_section || b.to != r.to_section) continue;
      const auto& wi = windows.at(static_cast<std::size_t>(b.from));
      const auto& wo = windows.at(static_cast<std::size_t>(b.to));
      const double qi = r.rho_in(0), qo = r.rho_out(0);
      if (qi < wi.lo || qi > wi.hi || qo < wo.lo || qo > wo.hi) continue;
      rep.max_p_in_error = std::max(rep.max_p_in_error, std::abs(-b.generating.d_in(qo, qi) - r.rho_in(1)));
      rep.max_p_out_error = std::max(rep.max_p_out_error, std::abs(b.generating.d_out(qo, qi) - r.rho_out(1)));
      ++rep.checked;
    }
  }
  return rep;
}

/// One block (2 pi i h)^{-1/2} |S''|^{1/2} e^{iS/h} on the window grids, with
/// sqrt(dq_out dq_in) quadrature weights so that unitary kernels give unitary
/// matrices. Throws CausticError when S'' changes sign on the grid.
inline CMat transfer_block(const GeneratingFunction& g, const TransferWindow& in, const TransferWindow& out,
                           double h) {
  if (!(h > 0.0)) throw InvalidArgument("bogomolny_transfer: h must be positive");
  if (in.points < 1 || out.points < 1 || !(in.hi > in.lo) || !(out.hi > out.lo)) {
    throw InvalidArgument("bogomolny_transfer: empty window");
  }
  const Complex prefactor = std::pow(2.0 * kPi * kI * h, -0.5) * std::sqrt(in.step() * out.step());
  CMat t(out.points, in.points);
  int sign = 0;
  for (int a = 0; a < out.points; ++a) {
    const double qo = out.node(a);
    for (int b = 0; b < in.points; ++b) {
      const double qi = in.node(b);
      const double m = g.mixed(qo, qi);
      const int sg = m > 0 ? 1 : (m < 0 ? -1 : 0);
      if (sg == 0 || (sign != 0 && sg != sign)) {
        throw CausticError("bogomolny_transfer: mixed derivative of S vanishes or changes sign in the window");
      }
      sign = sg;
      t(a, b) = prefactor * std::sqrt(std::abs(m)) * std::polar(1.0, g.value(qo, qi) / h) * out.weight(a) *
                in.weight(b);
    }
  }
  return t;
}

/// Transfer matrix over the atlas: one block per spec, sized by the windows
/// (one window per section). Blocks without atlas support are rejected.
inline OpenMapMatrix bogomolny_transfer(const ReturnMapAtlas& atlas, const std::vector<TransferBlockSpec>& blocks,
                                        const std::vector<TransferWindow>& windows, double h,
                                        double consistency_tol = 1e-3) {
  if (windows.size() != atlas.sections.size()) throw DimensionError("bogomolny_transfer: one window per section");
  for (const auto& b : blocks) {
    if (b.from == b.to) throw InvalidArgument("bogomolny_transfer: self-return blocks are excluded");
    if (!atlas.successors.at(static_cast<std::size_t>(b.from)).count(b.to)) {
      throw InvalidArgument("bogomolny_transfer: block outside the atlas adjacency");
    }
  }
  const auto rep = generating_function_consistency(atlas, blocks, windows);
  if (rep.max_p_in_error > consistency_tol || rep.max_p_out_error > consistency_tol) {
    throw InvalidArgument("bogomolny_transfer: generating function disagrees with the sampled return map");
  }
  std::vector<Eigen::Index> dims;
  for (const auto& w : windows) dims.push_back(w.points);
  OpenMapMatrix m(dims, h, Complex(atlas.energy, 0.0), "bogomolny");
  for (const auto& b : blocks) {
    m.set_block(static_cast<std::size_t>(b.to), static_cast<std::size_t>(b.from),
                transfer_block(b.generating, windows[static_cast<std::size_t>(b.from)],
                               windows[static_cast<std::size_t>(b.to)], h));
  }
  return m;
}

/// S for the linear symplectic map q' = a q + b p, p' = c q + d p (b != 0).
inline GeneratingFunction linear_generating_function(double a, double b, double d) {
  if (b == 0.0) throw InvalidArgument("linear_generating_function: b must be nonzero");
  GeneratingFunction g;
  g.s = [a, b, d](double qo, double qi) { return (d * qo * qo - 2.0 * qi * qo + a * qi * qi) / (2.0 * b); };
  g.ds_dout = [b, d](double qo, double qi) { return (d * qo - qi) / b; };
  g.ds_din = [a, b](double qo, double qi) { return (a * qi - qo) / b; };
  g.d2s = [b](double, double) { return -1.0 / b; };
  return g;
}

/// S for straight free motion between parallel lines a distance `gap` apart
/// at |xi| = sqrt(1 + E): S = sqrt(1 + E) sqrt(gap^2 + (q_out - q_in)^2).
inline GeneratingFunction free_flight_generating_function(double gap, double energy) {
  const double k = std::sqrt(1.0 + energy);
  GeneratingFunction g;
  g.s = [k, gap](double qo, double qi) { return k * std::hypot(gap, qo - qi); };
  g.ds_dout = [k, gap](double qo, double qi) { return k * (qo - qi) / std::hypot(gap, qo - qi); };
  g.ds_din = [k, gap](double qo, double qi) { return -k * (qo - qi) / std::hypot(gap, qo - qi); };
  g.d2s = [k, gap](double qo, double qi) {
    const double r = std::hypot(gap, qo - qi);
    return -k * gap * gap / (r * r * r);
  };
  return g;
}

}  // namespace poincarezeta
