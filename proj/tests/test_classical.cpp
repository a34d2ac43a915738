#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "poincarezeta/phase_flow/escape.hpp"
#include "poincarezeta/poincare/return_map.hpp"
#include "poincarezeta/poincare/three_bump.hpp"

using namespace poincarezeta;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Classical RK4 for x' = 2 xi, xi' = -grad V, kept apart from the splitting
// integrator so the periodic-orbit oracle does not reuse the code under test.
void rk4_step(const SchrodingerSystem& sys, Vec& x, Vec& xi, double h) {
  auto f = [&](const Vec& a, const Vec& b, Vec& da, Vec& db) {
    da = 2.0 * b;
    db = -sys.potential_gradient(a);
  };
  Vec k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
  f(x, xi, k1x, k1p);
  f(x + 0.5 * h * k1x, xi + 0.5 * h * k1p, k2x, k2p);
  f(x + 0.5 * h * k2x, xi + 0.5 * h * k2p, k3x, k3p);
  f(x + h * k3x, xi + h * k3p, k4x, k4p);
  x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
  xi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
}

// Symmetric orbit bouncing between bumps j and l: it crosses the bisector of
// the pair (the axis of the third bump m) perpendicularly. Shooting on the
// distance s from the origin along -x_m: after half a period the orbit must
// cross the axis again at the same s, moving the other way.
struct PeriodicOrbit {
  int third = 3;
  PhasePoint start;
  double period = 0.0;
};

PeriodicOrbit shoot_periodic_orbit(const SchrodingerSystem& sys, int third) {
  const Eigen::Vector2d a = -bump_centre(third);
  const Eigen::Vector2d nu(-a(1), a(0));
  auto start = [&](double s) {
    const Vec x = s * Vec(a);
    return PhasePoint(x, std::sqrt(1.0 - sys.potential(x)) * Vec(nu));
  };
  auto half = [&](double s, double& t_half) {
    const auto r = start(s);
    Vec x = r.x, xi = r.xi;
    const double h = 2e-4;
    double t = 0.0, prev = nu.dot(x);
    for (long k = 0; k < 200000; ++k) {
      const Vec x0 = x, xi0 = xi;
      rk4_step(sys, x, xi, h);
      t += h;
      const double cur = nu.dot(x);
      if (k > 10 && prev > 0 && cur <= 0) {
        double lo = 0, hi = h;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          Vec xx = x0, pp = xi0;
          rk4_step(sys, xx, pp, mid);
          (nu.dot(xx) > 0 ? lo : hi) = mid;
        }
        Vec xx = x0, pp = xi0;
        rk4_step(sys, xx, pp, hi);
        t_half = t - h + hi;
        return Vec(a).dot(xx) - s;
      }
      prev = cur;
    }
    ADD_FAILURE() << "shooting orbit never came back";
    return 0.0;
  };
  double s0 = 0.45, s1 = 0.55, th = 0.0;
  double f0 = half(s0, th), f1 = half(s1, th);
  for (int it = 0; it < 40 && std::abs(s1 - s0) > 1e-13; ++it) {
    const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
    s0 = s1;
    f0 = f1;
    s1 = s2;
    f1 = half(s1, th);
  }
  return {third, start(s1), 2.0 * th};
}

const SchrodingerSystem& bumps() {
  static const SchrodingerSystem sys = three_bump(4.0);
  return sys;
}

const PeriodicOrbit& orbit() {
  static const PeriodicOrbit po = shoot_periodic_orbit(bumps(), 3);
  return po;
}

SchrodingerSystem quadratic_x1() {
  return SchrodingerSystem(
      2, [](const Vec& x) { return x(0) * x(0); }, [](const Vec& x) { return v2(2 * x(0), 0); },
      [](const Vec&) {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 2;
        return h;
      },
      10.0);
}

}  // namespace

// ---------------------------------------------------------------- phase flow

TEST(HamiltonVectorField, FreeMotion) {
  const auto sys = free_system(2);
  const Vec v = hamilton_vector_field(sys, PhasePoint(v2(1, 0), v2(0, 1)));
  EXPECT_EQ(v, (Vec(4) << 0, 2, 0, 0).finished());
}

TEST(HamiltonVectorField, ThreeBumpOriginIsCritical) {
  const Vec v = hamilton_vector_field(bumps(), PhasePoint(v2(0, 0), v2(0, 0)));
  EXPECT_LT(v.norm(), 1e-14);
}

TEST(HamiltonVectorField, QuadraticPotential) {
  const Vec v = hamilton_vector_field(quadratic_x1(), PhasePoint(v2(1, 0), v2(0, 0)));
  EXPECT_EQ(v, (Vec(4) << 0, 0, -2, 0).finished());
}

TEST(HamiltonianSystem, GradientMatchesFiniteDifferences) {
  EXPECT_LT(gradient_consistency(bumps(), 2.0), 1e-5);
  EXPECT_LT(gradient_consistency(quadratic_x1(), 2.0), 1e-5);
}

TEST(PhasePoint, RejectsNonFinite) {
  EXPECT_THROW(PhasePoint(v2(NAN, 0), v2(0, 0)), InvalidArgument);
  EXPECT_THROW(PhasePoint(v2(0, 0), Vec::Zero(3)), DimensionError);
}

TEST(IntegrateFlow, FreeStraightLine) {
  const auto end = integrate_flow(free_system(2), PhasePoint(v2(0, 0), v2(1, 0)), 3.0, 1e-2);
  EXPECT_NEAR((end.x - v2(6, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((end.xi - v2(1, 0)).norm(), 0.0, 1e-12);
}

TEST(IntegrateFlow, ReversibleAndGroupLaw) {
  const PhasePoint rho(v2(0.1, -0.2), v2(0.7, 0.3));
  const auto fwd = integrate_flow(bumps(), rho, 4.0, 1e-3);
  const auto back = integrate_flow(bumps(), fwd, -4.0, 1e-3);
  EXPECT_LT((back.stacked() - rho.stacked()).norm(), 1e-8);
  const auto two = integrate_flow(bumps(), integrate_flow(bumps(), rho, 2.5, 1e-3), 1.5, 1e-3);
  EXPECT_LT((two.stacked() - fwd.stacked()).norm(), 1e-7);
}

TEST(IntegrateFlow, EnergyConservedOverLongRuns) {
  const auto& po = orbit();
  const PhasePoint rho(po.start.x + v2(0.01, 0.0), po.start.xi);
  const auto traj = integrate_trajectory(bumps(), rho, 100.0, 1e-3, 100);
  double drift = 0.0;
  for (const auto& p : traj.points) drift = std::max(drift, std::abs(symbol(bumps(), p) - symbol(bumps(), rho)));
  EXPECT_LT(drift, 1e-8);
}

TEST(IntegrateFlow, OverflowIsReported) {
  EXPECT_THROW(integrate_flow(free_system(1), PhasePoint(Vec::Constant(1, 0.0), Vec::Constant(1, 1e6)), 1000.0, 1.0),
               StepOverflow);
}

TEST(IntegrateFlow, PeriodicOrbitCloses) {
  const auto& po = orbit();
  EXPECT_NEAR(symbol(bumps(), po.start), 0.0, 1e-12);
  const auto end = integrate_flow(bumps(), po.start, po.period, 1e-3);
  EXPECT_LT((end.stacked() - po.start.stacked()).norm(), 1e-3);
}

TEST(TangentFlow, FreeFlowIsShear) {
  const auto tf = tangent_flow(free_system(2), PhasePoint(v2(0, 0), v2(0.3, 0.1)), 1.0, 1e-2);
  Mat expected = Mat::Identity(4, 4);
  expected.topRightCorner(2, 2) = 2.0 * Mat::Identity(2, 2);
  EXPECT_LT((tf.jacobian - expected).norm(), 1e-12);
}

TEST(TangentFlow, MatchesFiniteDifferencesAndIsSymplectic) {
  const PhasePoint rho(v2(0.2, 0.1), v2(0.5, -0.6));
  const double t = 3.0, dt = 1e-3, e = 1e-6;
  const auto tf = tangent_flow(bumps(), rho, t, dt);
  Mat fd(4, 4);
  for (int j = 0; j < 4; ++j) {
    Vec plus = rho.stacked(), minus = rho.stacked();
    plus(j) += e;
    minus(j) -= e;
    const auto a = integrate_flow(bumps(), PhasePoint(plus.head(2), plus.tail(2)), t, dt);
    const auto b = integrate_flow(bumps(), PhasePoint(minus.head(2), minus.tail(2)), t, dt);
    fd.col(j) = (a.stacked() - b.stacked()) / (2 * e);
  }
  EXPECT_LT((fd - tf.jacobian).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(tf.jacobian.determinant(), 1.0, 1e-8);
  EXPECT_LT(symplectic_defect(tf.jacobian), 1e-6);
  const auto tf10 = tangent_flow(bumps(), rho, 10.0, dt);
  EXPECT_LT(symplectic_defect(tf10.jacobian), 1e-6);
}

TEST(EscapeTime, FreeMotion) {
  const auto sys = free_system(2, 1.0);
  EXPECT_NEAR(escape_time(sys, PhasePoint(v2(0, 0), v2(0.5, 0)), 5.0, 100.0, 1e-2), 5.0, 1e-10);
}

TEST(EscapeTime, PeriodicOrbitNeverEscapes) {
  // the orbit is unstable (multiplier ~ e^5 per period), so rounding errors
  // only stay below the interaction radius for a few periods
  const double radius = bumps().interaction_radius();
  EXPECT_EQ(escape_time(bumps(), orbit().start, radius, 4.0 * orbit().period, 1e-3), 4.0 * orbit().period);
}

TEST(EscapeTime, MonotoneInRadius) {
  const double r = bumps().interaction_radius();
  for (double ang : {0.1, 0.9, 2.0}) {
    const PhasePoint rho(v2(0.1, 0.05), v2(std::cos(ang), std::sin(ang)));
    const auto p = project_to_shell(bumps(), rho, 0.0);
    ASSERT_TRUE(p);
    EXPECT_LE(escape_time(bumps(), *p, r, 50.0, 1e-3), escape_time(bumps(), *p, r + 1.0, 50.0, 1e-3));
  }
  EXPECT_THROW(escape_time(bumps(), orbit().start, 1.0, 10.0, 1e-3), InvalidArgument);
}

TEST(TrappedSet, FreeFlowTrapsNothing) {
  TrappedGrid grid;
  grid.points_per_axis = 5;
  grid.directions = 4;
  EXPECT_THROW(sample_trapped_set(free_system(2, 1.0), 0.0, grid, 3.0, 1e-2), EmptySample);
}

TEST(TrappedSet, ThreeBumpSampleNearTheBounceOrbits) {
  TrappedGrid grid;
  grid.half_width = 1.0;
  grid.points_per_axis = 21;
  grid.directions = 16;
  const double threshold = 2.5;
  const auto sample = sample_trapped_set(bumps(), 0.0, grid, threshold, 2e-3);
  ASSERT_FALSE(sample.points.empty());
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    EXPECT_LE(std::abs(symbol(bumps(), sample.points[i])), 1e-8);
    EXPECT_GE(sample.escape_times[i], threshold);
    EXPECT_LT(sample.points[i].x.norm(), bumps().interaction_radius());
  }
  // each of the three bounce orbits has a sample point near its axis crossing
  for (int third = 1; third <= 3; ++third) {
    const auto po = shoot_periodic_orbit(bumps(), third);
    double best = 1e9;
    for (const auto& p : sample.points) {
      const double dx = (p.x - po.start.x).norm();
      const double dir = std::min((p.xi.normalized() - po.start.xi.normalized()).norm(),
                                  (p.xi.normalized() + po.start.xi.normalized()).norm());
      best = std::min(best, dx + dir);
    }
    EXPECT_LT(best, 0.4) << "orbit around bump " << third;
  }
}

TEST(TrappedSet, StableUnderSmallEnergyShift) {
  TrappedGrid grid;
  grid.points_per_axis = 11;
  grid.directions = 12;
  const auto sample = sample_trapped_set(bumps(), 0.0, grid, 1.5, 2e-3);
  EXPECT_GT(trapped_fraction_retained(bumps(), sample, 1e-3, 2e-3), 0.5);
}

TEST(Hyperbolicity, FreeFlowIsNotHyperbolic) {
  const auto e = hyperbolicity_at(free_system(2, 1.0), PhasePoint(v2(0, 0), v2(1, 0)), 100.0, 0.1, 1.0);
  EXPECT_FALSE(e.hyperbolic);
  EXPECT_NEAR(e.lambda, 0.0, 0.02);
  EXPECT_NEAR(e.power_exponent, 1.0, 0.05);
}

TEST(Hyperbolicity, BounceOrbitIsHyperbolic) {
  const auto& po = orbit();
  // monodromy oracle: transverse block of the tangent map over one period
  const auto tf = tangent_flow(bumps(), po.start, po.period, 1e-3);
  const Mat w = transverse_basis(bumps(), po.start);
  const Mat mono = w.transpose() * tf.jacobian * w;
  EXPECT_GT(std::abs(mono.trace()), 2.0);
  const double lambda_oracle = std::log(std::abs(mono.eigenvalues()(0)) > 1 ? std::abs(mono.eigenvalues()(0))
                                                                          : std::abs(mono.eigenvalues()(1))) /
                               po.period;
  const auto fwd = hyperbolicity_at(bumps(), po.start, 3.0 * po.period, 1e-3);
  const auto bwd = hyperbolicity_at(bumps(), po.start, -3.0 * po.period, 1e-3);
  EXPECT_TRUE(fwd.hyperbolic);
  EXPECT_GT(fwd.lambda, 0.0);
  EXPECT_NEAR(fwd.lambda, bwd.lambda, 0.2 * fwd.lambda);
  EXPECT_NEAR(fwd.lambda, lambda_oracle, 0.2 * lambda_oracle);
}

// ---------------------------------------------------------------- poincare

namespace {

SectionChart normal_form_section(const NormalFormSystem& sys, int index, double offset, double energy = 0.0) {
  Vec lo(2), hi(2);
  lo << -1, -1;
  hi << 1, 1;
  return hyperplane_section(sys, index, v2(0, 1), offset, 1, lo, hi, energy);
}

}  // namespace

TEST(DetectCrossing, NormalFormLinearMotion) {
  NormalFormSystem sys(2);
  const auto chart = normal_form_section(sys, 0, 0.0);
  const auto hit = detect_crossing(sys, PhasePoint(v2(0.3, -1), v2(0.2, 1)), chart, 0.03);
  EXPECT_NEAR(hit.time, 1.0, 1e-10);
  EXPECT_LE(std::abs(chart.defining(hit.point)), 1e-10);
}

TEST(DetectCrossing, NoCrossingBeyondHorizon) {
  NormalFormSystem sys(2);
  const auto chart = normal_form_section(sys, 0, 0.0);
  CrossingOptions opt;
  opt.horizon = 0.5;
  EXPECT_THROW(detect_crossing(sys, PhasePoint(v2(0, -1), v2(0, 1)), chart, 0.01, opt), NoCrossing);
}

TEST(DetectCrossing, BounceOrbitHalfPeriod) {
  const auto& po = orbit();
  const auto charts = three_bump_sections(bumps(), 0.0);
  // sections 4 and 5 lie on the axis of bump 3; the orbit starts on one of them
  const auto hit = first_crossing(bumps(), po.start, charts, 1e-3, CrossingOptions{});
  EXPECT_NEAR(hit.time, 0.5 * po.period, 1e-6);
  EXPECT_LE(std::abs(charts[static_cast<std::size_t>(hit.section)].defining(hit.point)), 1e-10);
  EXPECT_EQ(three_bump_section_info(hit.section).third, 3);
}

TEST(ReturnMap, NormalFormParallelSections) {
  NormalFormSystem sys(2);
  const std::vector<SectionChart> charts{normal_form_section(sys, 0, 0.0), normal_form_section(sys, 1, 1.0)};
  const Vec c = v2(0.25, -0.4);
  const auto rec = return_map_sample(sys, charts, 0, c, 0.05);
  EXPECT_EQ(rec.to_section, 1);
  EXPECT_NEAR(rec.t_plus, 1.0, 1e-10);
  EXPECT_LT((rec.rho_out - c).norm(), 1e-12);
  EXPECT_LT((rec.jacobian - Mat::Identity(2, 2)).norm(), 1e-10);
  EXPECT_LT(symplectic_check(rec).max_form_error, 1e-10);
}

TEST(ReturnMap, IdentityRecordHasNoSymplecticError) {
  ReturnRecord r;
  r.jacobian = Mat::Identity(2, 2);
  const auto rep = symplectic_check(r);
  EXPECT_EQ(rep.max_det_error, 0.0);
  EXPECT_EQ(rep.max_form_error, 0.0);
}

TEST(ReturnMap, FreeFlowBetweenParallelLines) {
  const auto sys = free_system(2, 100.0);
  Vec lo(2), hi(2);
  lo << -1, -0.5;
  hi << 1, 0.5;
  const std::vector<SectionChart> charts{hyperplane_section(sys, 0, v2(0, 1), 0.0, 1, lo, hi, 0.0),
                                         hyperplane_section(sys, 1, v2(0, 1), 1.0, 1, lo, hi, 0.0)};
  const auto rec = return_map_sample(sys, charts, 0, v2(0.1, 0.3), 1e-2);
  EXPECT_LT(symplectic_check(rec).max_form_error, 1e-10);
}

TEST(SectionChart, DeformedSections) {
  NormalFormSystem sys(2);
  const auto chart = normal_form_section(sys, 0, 0.0);
  const auto same = energy_deformed_section(chart, 0.0);
  const auto moved = energy_deformed_section(chart, 0.05);
  const Vec c = v2(0.3, 0.2);
  EXPECT_EQ(same.chart(c)->stacked(), chart.chart(c)->stacked());
  const Vec d = moved.chart(c)->stacked() - chart.chart(c)->stacked();
  EXPECT_NEAR(d(3), 0.05, 1e-14);  // only xi_n moves
  EXPECT_LT(d.head(3).norm(), 1e-15);
  EXPECT_THROW(energy_deformed_section(chart, 0.5), InvalidArgument);
}

TEST(SectionChart, ThreeBumpChartsAreValid) {
  const auto charts = three_bump_sections(bumps(), 0.0);
  ASSERT_EQ(charts.size(), 6u);
  for (const auto& c : charts) {
    const auto d = validate_chart(c);
    EXPECT_EQ(d.reachable, d.sampled);
    EXPECT_GT(d.min_transversality, 0.1);
    EXPECT_LT(d.max_roundtrip_error, 1e-8);
  }
  for (std::size_t a = 0; a < charts.size(); ++a)
    for (std::size_t b = a + 1; b < charts.size(); ++b) EXPECT_GT(chart_separation(charts[a], charts[b]), 0.0);
}

TEST(Atlas, TwoSectionsOnOneClosedOrbit) {
  auto all = three_bump_sections(bumps(), 0.0);
  std::vector<SectionChart> charts{all[4], all[5]};
  charts[0].index = 0;
  charts[1].index = 1;
  const auto atlas = build_atlas(bumps(), charts, 7, 0.0, 2e-3);
  EXPECT_EQ(atlas.successors[0], std::set<int>{1});
  EXPECT_EQ(atlas.successors[1], std::set<int>{0});
}

TEST(Atlas, BounceOrbitReturnIsHyperbolic) {
  const auto& po = orbit();
  const auto charts = three_bump_sections(bumps(), 0.0);
  int from = -1;
  for (int k = 0; k < 6; ++k)
    if (charts[static_cast<std::size_t>(k)].accepts(po.start) && std::abs(charts[static_cast<std::size_t>(k)].defining(po.start)) < 1e-12)
      from = k;
  ASSERT_GE(from, 0);
  const Vec c = charts[static_cast<std::size_t>(from)].inverse(po.start);
  const auto r1 = return_map_sample(bumps(), charts, from, c, 1e-3);
  const auto r2 = return_map_sample(bumps(), charts, r1.to_section, r1.rho_out, 1e-3);
  EXPECT_EQ(r2.to_section, from);
  EXPECT_LT((r2.rho_out - c).norm(), 1e-6);
  EXPECT_NEAR(r1.t_plus + r2.t_plus, po.period, 1e-6);
  const Mat loop = r2.jacobian * r1.jacobian;
  const auto ev = loop.eigenvalues();
  const double big = std::max(std::abs(ev(0)), std::abs(ev(1)));
  const double small = std::min(std::abs(ev(0)), std::abs(ev(1)));
  EXPECT_GT(big, 1.0);
  EXPECT_NEAR(big * small, 1.0, 1e-5);
  // same multiplier as the monodromy oracle
  const auto tf = tangent_flow(bumps(), po.start, po.period, 1e-3);
  const Mat w = transverse_basis(bumps(), po.start);
  const auto mev = (w.transpose() * tf.jacobian * w).eigenvalues();
  EXPECT_NEAR(big, std::max(std::abs(mev(0)), std::abs(mev(1))), 1e-3 * big);
}

TEST(Atlas, ThreeBumpAdjacencySymplecticityAndReversal) {
  const auto charts = three_bump_sections(bumps(), 0.0);
  const auto atlas = build_atlas(bumps(), charts, 9, 0.0, 1e-3);
  // expected successors: sections whose pair contains the bump being approached,
  // crossed while heading away from it
  for (int k = 0; k < 6; ++k) {
    const int b = three_bump_section_info(k).toward;
    std::set<int> expected;
    for (int i = 0; i < 6; ++i) {
      const auto info = three_bump_section_info(i);
      const auto [p, q] = three_bump_pair(info.third);
      if ((p == b || q == b) && info.toward != b) expected.insert(i);
    }
    EXPECT_EQ(atlas.successors[static_cast<std::size_t>(k)], expected) << "section " << k;
  }
  double tmax = 0.0;
  for (const auto& r : atlas.records) {
    EXPECT_NE(r.from_section, r.to_section);
    EXPECT_GT(r.t_plus, 0.0);
    tmax = std::max(tmax, r.t_plus);
  }
  EXPECT_EQ(atlas.t_max, tmax);
  const auto rep = symplectic_check(atlas);
  EXPECT_LE(rep.max_form_error, 1e-5);
  EXPECT_LE(rep.max_det_error, 1e-5);
  double worst = 0.0;
  for (std::size_t j = 0; j < atlas.records.size(); j += 5) {
    const auto& r = atlas.records[j];
    const auto [sec, coords] = return_map_backward(bumps(), charts, r.to_section, r.rho_out, 1e-3);
    EXPECT_EQ(sec, r.from_section);
    worst = std::max(worst, (coords - r.rho_in).norm());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Atlas, ContinuousInEnergy) {
  const auto charts = three_bump_sections(bumps(), 0.0);
  const auto& po = orbit();
  int from = -1;
  for (int k = 0; k < 6; ++k)
    if (charts[static_cast<std::size_t>(k)].accepts(po.start)) from = k;
  ASSERT_GE(from, 0);
  const Vec c = charts[static_cast<std::size_t>(from)].inverse(po.start);
  const auto base = return_map_sample(bumps(), charts, from, c, 1e-3);
  double worst_t = 0.0;
  for (double z : {-0.01, -1e-3, 1e-3, 0.01}) {
    std::vector<SectionChart> moved;
    for (const auto& ch : charts) moved.push_back(energy_deformed_section(ch, z));
    const auto r = return_map_sample(bumps(), moved, from, c, 1e-3);
    EXPECT_EQ(r.to_section, base.to_section);
    worst_t = std::max(worst_t, std::abs(r.t_plus - base.t_plus) / base.t_plus);
    if (std::abs(z) == 1e-3) EXPECT_LT((r.rho_out - base.rho_out).norm(), 10 * 1e-3);
  }
  EXPECT_LT(worst_t, 0.1);
}

TEST(Atlas, EmptyWhenNothingReturns) {
  const auto sys = free_system(2, 3.0);
  Vec lo(2), hi(2);
  lo << -0.5, -0.5;
  hi << 0.5, 0.5;
  const std::vector<SectionChart> charts{hyperplane_section(sys, 0, v2(0, 1), 0.0, 1, lo, hi, 0.0)};
  EXPECT_THROW(build_atlas(sys, charts, 3, 0.0, 1e-2), EmptyAtlas);
}
