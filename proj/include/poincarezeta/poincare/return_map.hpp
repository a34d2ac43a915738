#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "poincarezeta/core/parallel.hpp"
#include "poincarezeta/phase_flow/integrator.hpp"
#include "poincarezeta/poincare/section.hpp"

namespace poincarezeta {

struct CrossingOptions {
  double horizon = 20.0;        // give up after this much flow time
  double escape_radius = 0.0;   // 0: system interaction radius; orbit leaving it has escaped
  double tolerance = 1e-10;     // |s_k| at the refined crossing
};

struct Crossing {
  PhasePoint point;
  double time = 0.0;   // signed flow time from the start
  int section = -1;    // position in the chart list
  Mat jacobian;        // d Phi^time at the start (only when requested)
};

namespace detail {

// Refines tau in the step [0, h] where s changes sign: bisection, then Newton polish.
template <SeparableHamiltonian H>
double refine_crossing(const H& sys, const SectionChart& chart, const Vec& x0, const Vec& xi0,
                       double h, double tol) {
  auto s_at = [&](double tau) {
    Vec x = x0, xi = xi0;
    splitting_step(sys, x, xi, tau);
    return chart.defining(PhasePoint(x, xi));
  };
  double lo = 0.0, hi = h;
  double s_lo = s_at(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s_mid = s_at(mid);
    if (std::abs(s_mid) <= 0.01 * tol || std::abs(hi - lo) < 1e-15) return mid;
    if ((s_mid > 0) == (s_lo > 0)) {
      lo = mid;
      s_lo = s_mid;
    } else {
      hi = mid;
    }
    if (std::abs(hi - lo) < 1e-6 * std::abs(h)) break;
  }
  double tau = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    Vec x = x0, xi = xi0;
    splitting_step(sys, x, xi, tau);
    const PhasePoint rho(x, xi);
    const double s = chart.defining(rho);
    if (std::abs(s) <= 0.01 * tol) break;
    const double ds = chart.defining_gradient(rho).dot(hamilton_vector_field(sys, rho));
    if (ds == 0.0) break;
    const double next = tau - s / ds;
    if (!((next - lo) * (next - hi) <= 0.0)) break;  // keep inside the bracket
    tau = next;
  }
  return tau;
}

}  // namespace detail

/// First crossing (in the direction of `direction`, +1 forward / -1 backward) of
/// any chart in `charts` that the chart accepts.
template <SeparableHamiltonian H>
Crossing first_crossing(const H& sys, const PhasePoint& rho0, const std::vector<SectionChart>& charts,
                        double dt, const CrossingOptions& opt, int direction = 1,
                        bool with_jacobian = false) {
  if (!(dt > 0.0)) throw InvalidArgument("first_crossing: dt must be positive");
  const auto n = sys.dimension();
  const double radius = opt.escape_radius > 0.0 ? opt.escape_radius : sys.interaction_radius();
  const double h = direction >= 0 ? dt : -dt;
  Vec x = rho0.x, xi = rho0.xi;
  Mat jac = Mat::Identity(2 * n, 2 * n);
  std::vector<double> s_prev(charts.size());
  std::vector<bool> departing(charts.size());  // the start lies on this chart's hypersurface
  for (std::size_t c = 0; c < charts.size(); ++c) {
    s_prev[c] = charts[c].defining(rho0);
    departing[c] = std::abs(s_prev[c]) <= 1e-8;
  }

  double t = 0.0;
  while (std::abs(t) < opt.horizon) {
    const Vec x0 = x, xi0 = xi;
    const Mat jac0 = jac;
    splitting_step(sys, x, xi, h, with_jacobian ? &jac : nullptr);
    if (overflowed(x, xi)) throw StepOverflow("first_crossing: trajectory left the 1e9 box");
    const PhasePoint here(x, xi);

    // earliest accepted sign change in this step
    double best_tau = 0.0;
    int best = -1;
    for (std::size_t c = 0; c < charts.size(); ++c) {
      const double s_now = charts[c].defining(here);
      const bool changed = (s_prev[c] < 0 && s_now >= 0) || (s_prev[c] > 0 && s_now <= 0);
      s_prev[c] = s_now;
      if (departing[c]) {
        departing[c] = false;
        continue;
      }
      if (!changed) continue;
      const double tau = detail::refine_crossing(sys, charts[c], x0, xi0, h, opt.tolerance);
      Vec xc = x0, xic = xi0;
      splitting_step(sys, xc, xic, tau);
      const PhasePoint hit(xc, xic);
      if (!charts[c].accepts(hit)) continue;
      if (best < 0 || std::abs(tau) < std::abs(best_tau)) {
        best = static_cast<int>(c);
        best_tau = tau;
      }
    }
    if (best >= 0) {
      Crossing out;
      Vec xc = x0, xic = xi0;
      Mat jc = jac0;
      splitting_step(sys, xc, xic, best_tau, with_jacobian ? &jc : nullptr);
      out.point = PhasePoint(xc, xic);
      out.time = t + best_tau;
      out.section = best;
      if (with_jacobian) out.jacobian = jc;
      return out;
    }
    t += h;
    if (x.norm() >= radius && x.dot(xi) * direction > 0) {
      throw NoCrossing("first_crossing: orbit escaped before reaching a section");
    }
  }
  throw NoCrossing("first_crossing: no section reached within the horizon");
}

/// First forward crossing of a single chart.
template <SeparableHamiltonian H>
Crossing detect_crossing(const H& sys, const PhasePoint& rho0, const SectionChart& chart, double dt,
                         const CrossingOptions& opt = {}) {
  return first_crossing(sys, rho0, std::vector<SectionChart>{chart}, dt, opt, 1, false);
}

struct ReturnRecord {
  int from_section = -1;  // k
  int to_section = -1;    // i
  Vec rho_in;             // chart coordinates in Sigma_k
  Vec rho_out;            // chart coordinates in Sigma_i
  double t_plus = 0.0;
  Mat jacobian;           // chart-level derivative of F_ik, 2(n-1) x 2(n-1)
  long seed = -1;
};

/// Projects a 2n x 2n flow Jacobian onto chart coordinates: the flow-time
/// correction removes the H_p component that would leave {s_i = 0}.
template <SeparableHamiltonian H>
Mat reduce_to_charts(const H& sys, const Mat& flow_jac, const SectionChart& from, const Vec& coords_in,
                     const SectionChart& to, const PhasePoint& rho_out) {
  const Vec hp = hamilton_vector_field(sys, rho_out);
  const Vec ds = to.defining_gradient(rho_out);
  const Mat proj = Mat::Identity(hp.size(), hp.size()) - hp * ds.transpose() / ds.dot(hp);
  return to.inverse_jacobian(rho_out) * proj * flow_jac * from.chart_jacobian(coords_in);
}

/// F_ik at one departure point of chart `from` (index into charts).
template <SeparableHamiltonian H>
ReturnRecord return_map_sample(const H& sys, const std::vector<SectionChart>& charts, int from,
                               const Vec& coords_in, double dt, const CrossingOptions& opt = {}) {
  const auto& src = charts.at(static_cast<std::size_t>(from));
  const auto rho = src.chart(coords_in);
  if (!rho) throw InvalidArgument("return_map_sample: departure coordinates are off the energy shell");
  const Crossing hit = first_crossing(sys, *rho, charts, dt, opt, 1, true);
  const auto& dst = charts[static_cast<std::size_t>(hit.section)];
  ReturnRecord rec;
  rec.from_section = src.index;
  rec.to_section = dst.index;
  rec.rho_in = coords_in;
  rec.rho_out = dst.inverse(hit.point);
  rec.t_plus = hit.time;
  rec.jacobian = reduce_to_charts(sys, hit.jacobian, src, coords_in, dst, hit.point);
  return rec;
}

/// Time-reversed return: from an arrival point on chart `to`, flows backward to
/// the first accepted crossing and returns (section position, coordinates).
template <SeparableHamiltonian H>
std::pair<int, Vec> return_map_backward(const H& sys, const std::vector<SectionChart>& charts, int to,
                                        const Vec& coords_out, double dt, const CrossingOptions& opt = {}) {
  const auto rho = charts.at(static_cast<std::size_t>(to)).chart(coords_out);
  if (!rho) throw InvalidArgument("return_map_backward: arrival coordinates are off the energy shell");
  const Crossing hit = first_crossing(sys, *rho, charts, dt, opt, -1, false);
  return {hit.section, charts[static_cast<std::size_t>(hit.section)].inverse(hit.point)};
}

struct ReturnMapAtlas {
  std::vector<SectionChart> sections;
  std::vector<ReturnRecord> records;
  double energy = 0.0;
  double t_max = 0.0;
  std::vector<std::set<int>> successors;  // J_+(k)
  std::vector<ReturnRecord> self_returns;  // rejected: from == to
  std::vector<long> no_crossing;           // per section: seeds outside D_k

  /// Seed indices of chart k whose record lands in chart i (sampled D_ik).
  std::vector<long> departure_set(int k, int i) const {
    std::vector<long> out;
    for (const auto& r : records)
      if (r.from_section == k && r.to_section == i) out.push_back(r.seed);
    return out;
  }
};

/// Chart coordinates of seed `s` on an m^{2(n-1)} lattice of the chart box.
inline Vec seed_coordinates(const SectionChart& chart, int m, long s) {
  const auto dim = chart.section_dim();
  Vec c(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const long k = s % m;
    s /= m;
    c(j) = chart.box_lo(j) + (chart.box_hi(j) - chart.box_lo(j)) * (m == 1 ? 0.5 : double(k) / (m - 1));
  }
  return c;
}

/// Sweeps an m^{2(n-1)} seed lattice in each chart box and collects return records.
/// Charts are identified by their position in `charts`; each chart's `index`
/// must equal that position.
template <SeparableHamiltonian H>
ReturnMapAtlas build_atlas(const H& sys, const std::vector<SectionChart>& charts, int seeds_per_axis,
                           double energy, double dt, const CrossingOptions& opt = {}) {
  if (charts.empty()) throw InvalidArgument("build_atlas: no charts");
  if (seeds_per_axis < 1) throw InvalidArgument("build_atlas: seed grid must be nonempty");
  std::vector<SectionChart> deformed;
  for (std::size_t c = 0; c < charts.size(); ++c) {
    if (charts[c].index != static_cast<int>(c)) throw InvalidArgument("build_atlas: chart index mismatch");
    deformed.push_back(std::abs(charts[c].energy - energy) > 0.0 ? charts[c].at_energy(energy) : charts[c]);
  }
  const auto dim = deformed.front().section_dim();
  long per_chart = 1;
  for (Eigen::Index j = 0; j < dim; ++j) per_chart *= seeds_per_axis;
  const std::size_t total = deformed.size() * static_cast<std::size_t>(per_chart);

  enum class Outcome : char { Off, Escape, Hit };
  std::vector<ReturnRecord> slots(total);
  std::vector<Outcome> outcome(total, Outcome::Off);
  parallel_for(total, [&](std::size_t flat) {
    const int k = static_cast<int>(flat / static_cast<std::size_t>(per_chart));
    const long s = static_cast<long>(flat % static_cast<std::size_t>(per_chart));
    const Vec coords = seed_coordinates(deformed[static_cast<std::size_t>(k)], seeds_per_axis, s);
    if (!deformed[static_cast<std::size_t>(k)].chart(coords)) return;
    try {
      slots[flat] = return_map_sample(sys, deformed, k, coords, dt, opt);
      slots[flat].seed = s;
      outcome[flat] = Outcome::Hit;
    } catch (const NoCrossing&) {
      outcome[flat] = Outcome::Escape;
    } catch (const StepOverflow&) {
      outcome[flat] = Outcome::Escape;
    }
  });

  ReturnMapAtlas atlas;
  atlas.sections = deformed;
  atlas.energy = energy;
  atlas.successors.assign(deformed.size(), {});
  atlas.no_crossing.assign(deformed.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    const auto k = flat / static_cast<std::size_t>(per_chart);
    if (outcome[flat] == Outcome::Escape) ++atlas.no_crossing[k];
    if (outcome[flat] != Outcome::Hit) continue;
    auto& rec = slots[flat];
    if (rec.from_section == rec.to_section) {
      atlas.self_returns.push_back(std::move(rec));
      continue;
    }
    atlas.successors[static_cast<std::size_t>(rec.from_section)].insert(rec.to_section);
    atlas.t_max = std::max(atlas.t_max, rec.t_plus);
    atlas.records.push_back(std::move(rec));
  }
  if (atlas.records.empty()) throw EmptyAtlas("build_atlas: no return record survived");
  return atlas;
}

struct SymplecticReport {
  double max_det_error = 0.0;    // max |det J - 1|
  double mean_det_error = 0.0;
  double max_form_error = 0.0;   // max ||J^T Omega J - Omega||_max
  std::size_t count = 0;
};

inline SymplecticReport symplectic_check(const std::vector<ReturnRecord>& records) {
  SymplecticReport rep;
  for (const auto& r : records) {
    const double det_err = std::abs(r.jacobian.determinant() - 1.0);
    rep.max_det_error = std::max(rep.max_det_error, det_err);
    rep.mean_det_error += det_err;
    rep.max_form_error = std::max(rep.max_form_error, symplectic_defect(r.jacobian));
    ++rep.count;
  }
  if (rep.count) rep.mean_det_error /= static_cast<double>(rep.count);
  return rep;
}

inline SymplecticReport symplectic_check(const ReturnRecord& record) {
  return symplectic_check(std::vector<ReturnRecord>{record});
}

inline SymplecticReport symplectic_check(const ReturnMapAtlas& atlas) { return symplectic_check(atlas.records); }

}  // namespace poincarezeta
