// Acceptance run: one PASS/FAIL line per criterion, with the measured values
// and wall time. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "poincarezeta.hpp"

using namespace poincarezeta;

namespace {

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  if (!in_time) detail += " over time limit";
  ok = ok && in_time;
  failures += !ok;
  std::printf("[%s] %2d %-22s %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), secs,
              limit_s);
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Outgoing matching determinant for h^2 u'' = (V - 1 - z) u on [-X, X] by RK4,
// independent of the scaled discretization.
Complex matching_determinant(const ComplexPotential& v, double h, Complex z) {
  const double x_end = 2.0;
  const int steps = 80000;
  const Complex k = std::sqrt(z + 1.0) / h;
  auto rhs = [&](double x, const Complex (&y)[2], Complex (&dy)[2]) {
    dy[0] = y[1];
    dy[1] = (v(Complex(x, 0.0)) - 1.0 - z) / (h * h) * y[0];
  };
  Complex y[2] = {std::exp(kI * k * x_end), -kI * k * std::exp(kI * k * x_end)};
  const double dx = 2.0 * x_end / steps;
  double x = -x_end;
  Complex k1[2], k2[2], k3[2], k4[2], t[2];
  for (int s = 0; s < steps; ++s) {
    rhs(x, y, k1);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + 0.5 * dx * k1[i];
    rhs(x + 0.5 * dx, t, k2);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + 0.5 * dx * k2[i];
    rhs(x + 0.5 * dx, t, k3);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + dx * k3[i];
    rhs(x + dx, t, k4);
    for (int i = 0; i < 2; ++i) y[i] += dx / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    x += dx;
  }
  return y[0] * kI * k - y[1];
}

Complex matching_root(const ComplexPotential& v, double h, Complex z) {
  for (int it = 0; it < 40; ++it) {
    const double d = 1e-7;
    const Complex step = matching_determinant(v, h, z) /
                         ((matching_determinant(v, h, z + d) - matching_determinant(v, h, z - d)) / (2.0 * d));
    z -= step;
    if (std::abs(step) < 1e-13) break;
  }
  return z;
}

CMat gaussian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

int main() {
  std::printf("poincarezeta acceptance, %u worker thread(s)\n", worker_count());

  criterion(1, "grushin-schur-index", 5, [](std::string& d) {
    const auto r = grushin_selftest(2024, 200, 100, 0);
    d = "schur " + std::to_string(r.schur_passed) + "/" + std::to_string(r.schur_trials) + " worst " +
        num(r.schur_worst) + ", index " + std::to_string(r.index_passed) + "/" + std::to_string(r.index_trials);
    return r.schur_passed == 200 && r.index_passed == 100 && r.schur_worst <= 1e-10;
  });

  criterion(2, "trace-winding", 30, [](std::string& d) {
    std::mt19937_64 rng(7);
    const CircleContour contour{Complex(0.1, -0.2), 0.5};
    int agree = 0;
    for (int t = 0; t < 50; ++t) {
      const auto pencil = well_posed_pencil(rng, 5 + t % 20, contour);
      const auto r = verify_trace_formula(pencil, contour);
      agree += r.lhs == r.rhs;
    }
    d = "integer agreement " + std::to_string(agree) + "/50";
    return agree == 50;
  });

  criterion(3, "closed-form-zeta", 10, [](std::string& d) {
    const double h = 0.01, T = 1.0;
    const std::vector<Complex> lam{0.5, Complex(0.3, 0.1)};
    CMat m0 = CMat::Zero(2, 2);
    m0(0, 0) = lam[0];
    m0(1, 1) = lam[1];
    const SpectralWindow w{-0.1, 0.1, -0.02, 0.0};
    std::vector<Complex> expect;
    for (Complex l : lam)
      for (int k = -3; k <= 3; ++k) {
        const Complex z = (h / T) * (2.0 * kPi * k - kI * std::log(1.0 / l));
        if (w.contains(z)) expect.push_back(z);
      }
    const auto list = find_resonances(constant_time_zeta(m0, T, h), w);
    double worst = 0.0;
    bool simple = list.zeros.size() == expect.size();
    for (Complex e : expect) {
      double best = 1e9;
      for (const auto& r : list.zeros) {
        best = std::min(best, std::abs(r.z - e));
        simple = simple && r.multiplicity == 1;
      }
      worst = std::max(worst, best);
    }
    d = std::to_string(list.zeros.size()) + " zeros (expected " + std::to_string(expect.size()) + "), max error " +
        num(worst);
    return simple && worst <= 1e-8;
  });

  criterion(4, "open-baker-counting", 120, [](std::string& d) {
    const std::set<int> kept{0, 2};
    const auto fit = baker_counting_exponent({27, 81, 243}, kept, 0.5);
    const double dim = box_counting_dimension(kept).dimension / 2.0;
    const double gap = std::abs(fit.exponent - dim) / dim;
    d = "max|lambda| " + num(fit.max_modulus) + ", counts " + num(fit.counts[0]) + "/" + num(fit.counts[1]) + "/" +
        num(fit.counts[2]) + ", exponent " + num(fit.exponent) + " vs repeller dim/2 " + num(dim) + " (gap " +
        num(100 * gap) + "%)";
    return fit.max_modulus <= 1.0 + 1e-12 && gap <= 0.15;
  });

  criterion(5, "projector-rank-scaling", 120, [](std::string& d) {
    std::vector<double> inv_h, ranks;
    for (int n : {32, 64, 128, 256}) {
      inv_h.push_back(1.0 / torus_h(n));
      ranks.push_back(spectral_projector(disk_symbol(0.3), n, "disk").rank);
    }
    const double slope = loglog_slope(inv_h, ranks);
    d = "ranks " + num(ranks[0]) + "/" + num(ranks[1]) + "/" + num(ranks[2]) + "/" + num(ranks[3]) + ", exponent " +
        num(slope);
    return std::abs(slope - 1.0) <= 0.1;
  });

  criterion(6, "egorov-residual-decay", 60, [](std::string& d) {
    TorusSymbol a = [](double y, double) { return std::cos(2 * kPi * y); };
    TorusSymbol one = [](double, double) { return 1.0; };
    const auto chi = baker_departure_taper();
    std::vector<double> ns, res;
    // closed baker needs 3 | N
    for (int n : {66, 129, 258, 510}) {
      ns.push_back(n);
      res.push_back(egorov_residual(open_baker(n, {0, 1, 2}).block(0, 0), a, baker_map(), one, chi));
    }
    const double slope = -loglog_slope(ns, res);
    d = "residuals " + num(res[0]) + " .. " + num(res.back()) + ", decay slope " + num(slope);
    return slope >= 1.0;
  });

  criterion(7, "classical-engine", 120, [](std::string& d) {
    const auto sys = three_bump(4.0);
    TrappedGrid grid;
    const auto sample = sample_trapped_set(sys, 0.0, grid, 2.5, 2e-3);
    if (sample.points.empty()) {
      d = "no trapped sample";
      return false;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < sample.points.size(); ++i)
      if (sample.escape_times[i] > sample.escape_times[best]) best = i;
    const PhasePoint rho = sample.points[best];
    const auto traj = integrate_trajectory(sys, rho, 100.0, 1e-3, 100);
    double drift = 0.0;
    for (const auto& p : traj.points) drift = std::max(drift, std::abs(symbol(sys, p) - symbol(sys, rho)));

    const auto charts = three_bump_sections(sys, 0.0);
    const auto atlas = build_atlas(sys, charts, 9, 0.0, 1e-3);
    const auto rep = symplectic_check(atlas);
    double back = 0.0;
    for (const auto& r : atlas.records) {
      const auto [sec, coords] = return_map_backward(sys, charts, r.to_section, r.rho_out, 1e-3);
      back = std::max(back, sec == r.from_section ? (coords - r.rho_in).norm() : 1e9);
    }
    d = "drift " + num(drift) + ", symplectic " + num(rep.max_form_error) + " over " +
        std::to_string(atlas.records.size()) + " records, backward " + num(back);
    return drift <= 1e-8 && rep.max_form_error <= 1e-5 && back <= 1e-6;
  });

  criterion(8, "poisson-normalization", 1, [](std::string& d) {
    const PoissonGrid grid{32, 4000, -1.0, 1.0};
    auto v = [](double x) { return Complex(1.0 + 0.5 * std::cos(2 * kPi * x), 0.2 * std::sin(2 * kPi * x)); };
    const Complex r1 = poisson_normalization_check(grid, 0.01, 1.0, smooth_step(0.0, 0.6), v);
    const Complex r2 = poisson_normalization_check(grid, 0.01, 1.0, erf_step(0.1, 0.1), v);
    d = "|ratio - 1| " + num(std::abs(r1 - 1.0)) + " (smoothstep), " + num(std::abs(r2 - 1.0)) + " (erf)";
    return std::abs(r1 - 1.0) <= 1e-6 && std::abs(r2 - 1.0) <= 1e-6;
  });

  criterion(9, "forward-parametrix", 1, [](std::string& d) {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int t = 0; t < 19; ++t) {
      const CMat g = gaussian(rng, 10);
      worst = std::max(worst, forward_parametrix_check(0.5 * (g + g.adjoint()), Complex(0.2, -0.05), 1.0, 0.1).residual);
    }
    // degenerate: a double eigenvalue sitting exactly at z
    CMat a = CMat::Zero(3, 3);
    a.diagonal() << 0.3, 0.3, 1.0;
    worst = std::max(worst, forward_parametrix_check(a, 0.3, 2.0, 0.1).residual);
    d = "max residual " + num(worst) + " over 20 matrices";
    return worst <= 1e-10;
  });

  criterion(10, "complex-scaling-1d", 120, [](std::string& d) {
    const double h = 0.05;
    const auto v = smoothed_barrier(1.5, 0.5, 0.05);
    std::vector<Complex> oracle;
    for (Complex g : {Complex(0.524, -0.0085), Complex(0.597, -0.034), Complex(0.717, -0.075)})
      oracle.push_back(matching_root(v, h, g));
    DirectResonanceOptions opt;
    const auto list = resonances_direct(v, h, {0.3, 0.8, -0.1, -1e-6}, {0.3, 0.4, 0.5}, opt);
    double err = 0.0, shift = 0.0;
    for (Complex o : oracle) {
      double best = 1e9;
      for (const auto& r : list.zeros)
        if (std::abs(r.z - o) < best) {
          best = std::abs(r.z - o);
          shift = std::max(shift, r.theta_shift);
        }
      err = std::max(err, best);
    }
    const double resolvent = cutoff_resolvent_difference(v, h, 0.4, Complex(0.5, 0.5), opt.half_width, opt.radius, 1600);
    d = std::to_string(list.zeros.size()) + " resonances, oracle error " + num(err) + ", theta shift " + num(shift) +
        ", cutoff resolvent " + num(resolvent);
    return err <= 1e-6 && shift <= 1e-6 && resolvent <= 1e-6;
  });

  criterion(11, "trace-resummation", 5, [](std::string& d) {
    // random contractions with nonnegative spectrum: G G^H rescaled to norm 0.3 .. 0.9
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> radius(0.3, 0.9);
    int good = 0;
    double worst_ratio = 0.0;
    for (int t = 0; t < 20; ++t) {
      const CMat g = gaussian(rng, 4 + t % 8);
      CMat m = g * g.adjoint();
      m *= radius(rng) / spectral_radius(m);
      const double rho = spectral_radius(m);
      const Complex exact = zeta(m);
      double prev = std::abs(zeta_trace_expansion(m, 1) - exact);
      bool ok = true;
      for (int k = 2; k <= 60 && prev > 1e-12 * std::abs(exact); ++k) {
        const double err = std::abs(zeta_trace_expansion(m, k) - exact);
        worst_ratio = std::max(worst_ratio, err / (rho * prev));
        ok = ok && err <= rho * prev * (1 + 1e-9);
        prev = err;
      }
      good += ok;
    }
    d = std::to_string(good) + "/20 contractions, worst error ratio / rho " + num(worst_ratio);
    return good == 20;
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
