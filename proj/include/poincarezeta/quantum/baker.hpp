#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "poincarezeta/quantum/open_map.hpp"
#include "poincarezeta/quantum/torus.hpp"

namespace poincarezeta {

/// F_{jk} = N^{-1/2} exp(-2 pi i (j+1/2)(k+1/2)/N).
inline CMat shifted_dft(int n) {
  CMat f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) f(j, k) = scale * std::polar(1.0, -2.0 * kPi * (j + 0.5) * (k + 0.5) / n);
  return f;
}

/// B = F_N^{-1} blockdiag(G_0, G_1, G_2), G_b = F_{N/3} for kept branches and 0 otherwise.
inline OpenMapMatrix open_baker(int n, const std::set<int>& kept) {
  if (n <= 0 || n % 3 != 0) throw DimensionError("open_baker: N must be a positive multiple of 3");
  for (int b : kept)
    if (b < 0 || b > 2) throw InvalidArgument("open_baker: branches are 0, 1, 2");
  const int m = n / 3;
  const CMat fm = shifted_dft(m);
  CMat g = CMat::Zero(n, n);
  for (int b : kept) g.block(b * m, b * m, m, m) = fm;
  const CMat b = shifted_dft(n).adjoint() * g;
  std::string meta = "baker:N=" + std::to_string(n) + ":kept=";
  bool first = true;
  for (int k : kept) {
    meta += (first ? "" : ",") + std::to_string(k);
    first = false;
  }
  return OpenMapMatrix::single(b, torus_h(n), Complex(0.0, 0.0), meta);
}

/// Classical baker step (q, p) -> (3q - b, (p + b)/3), b = floor(3q); empty
/// when the branch b is not kept.
inline std::optional<std::pair<double, double>> baker_forward(double q, double p, const std::set<int>& kept) {
  const int b = std::clamp(static_cast<int>(std::floor(3.0 * q)), 0, 2);
  if (!kept.count(b)) return std::nullopt;
  return std::pair{3.0 * q - b, (p + b) / 3.0};
}

/// Inverse step (q, p) -> ((q + b)/3, 3p - b), b = floor(3p).
inline std::optional<std::pair<double, double>> baker_backward(double q, double p, const std::set<int>& kept) {
  const int b = std::clamp(static_cast<int>(std::floor(3.0 * p)), 0, 2);
  if (!kept.count(b)) return std::nullopt;
  return std::pair{(q + b) / 3.0, 3.0 * p - b};
}

struct BoxCount {
  std::vector<int> levels;      // k: box side 3^{-k}
  std::vector<double> counts;   // occupied boxes
  double dimension = 0.0;       // fitted box-counting dimension of the repeller in the square
};

/// Box counting of the repeller: a box of side 3^{-k} is occupied when a sample
/// point inside it survives k forward and k backward steps. Samples sit on a
/// grid `refine` times finer than the finest box.
inline BoxCount box_counting_dimension(const std::set<int>& kept, int max_level = 5, int refine = 3) {
  if (max_level < 2) throw InvalidArgument("box_counting_dimension: need at least two levels");
  BoxCount out;
  for (int k = 1; k <= max_level; ++k) {
    const long side = static_cast<long>(std::lround(std::pow(3.0, k)));
    const long grid = side * refine;
    std::unordered_set<long> boxes;
    for (long a = 0; a < grid; ++a) {
      const double q0 = (a + 0.5) / grid;
      // forward survival depends on q only, backward survival on p only
      double q = q0, p = 0.5;
      bool alive = true;
      for (int s = 0; s < k && alive; ++s) {
        auto next = baker_forward(q, p, kept);
        if (next) std::tie(q, p) = *next;
        else alive = false;
      }
      if (!alive) continue;
      for (long c = 0; c < grid; ++c) {
        const double p0 = (c + 0.5) / grid;
        double qq = 0.5, pp = p0;
        bool back = true;
        for (int s = 0; s < k && back; ++s) {
          auto prev = baker_backward(qq, pp, kept);
          if (prev) std::tie(qq, pp) = *prev;
          else back = false;
        }
        if (!back) continue;
        boxes.insert((a / refine) * side + c / refine);
      }
    }
    out.levels.push_back(k);
    out.counts.push_back(static_cast<double>(boxes.size()));
  }
  std::vector<double> inv_side;
  for (int k : out.levels) inv_side.push_back(std::pow(3.0, k));
  out.dimension = loglog_slope(inv_side, out.counts);
  return out;
}

/// Eigenvalues of a square matrix.
inline CVec eigenvalues(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  if (es.info() != Eigen::Success) throw InvalidArgument("eigenvalues: solver failed");
  return es.eigenvalues();
}

struct CountingFit {
  std::vector<int> sizes;
  std::vector<double> counts;   // #{|lambda| >= threshold}
  double max_modulus = 0.0;
  double exponent = 0.0;        // fitted d log count / d log N
};

inline CountingFit baker_counting_exponent(const std::vector<int>& sizes, const std::set<int>& kept,
                                           double threshold = 0.5) {
  CountingFit fit;
  std::vector<double> ns;
  for (int n : sizes) {
    const CVec ev = eigenvalues(open_baker(n, kept).block(0, 0));
    int c = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      fit.max_modulus = std::max(fit.max_modulus, std::abs(ev(i)));
      if (std::abs(ev(i)) >= threshold) ++c;
    }
    fit.sizes.push_back(n);
    fit.counts.push_back(c);
    ns.push_back(n);
  }
  fit.exponent = loglog_slope(ns, fit.counts);
  return fit;
}

/// Classical map on the torus cell.
using TorusMap = std::function<std::pair<double, double>(double, double)>;

/// Closed baker (q, p) -> (3q - b, (p + b)/3).
inline TorusMap baker_map() {
  return [](double q, double p) {
    const int b = std::clamp(static_cast<int>(std::floor(3.0 * q)), 0, 2);
    return std::pair{3.0 * q - b, (p + b) / 3.0};
  };
}

/// Departure window of the baker: one inside every branch away from the
/// discontinuities q in {0, 1/3, 2/3} and p in {0}.
inline TorusSymbol baker_departure_taper(double width = 0.2, std::set<int> branches = {0, 1, 2}) {
  return [width, branches](double q, double p) {
    const double qq = q - std::floor(q), pp = p - std::floor(p);
    const int b = std::clamp(static_cast<int>(std::floor(3.0 * qq)), 0, 2);
    if (!branches.count(b)) return 0.0;
    return cosine_taper(3.0 * qq - b, width) * cosine_taper(pp, width);
  };
}

/// || Op(chi) (M^H Op(a) M - Op(alpha * (a o F))) Op(chi) ||: the Egorov defect
/// of the square map m, seen through the departure window chi.
inline double egorov_residual(const CMat& m, const TorusSymbol& a, const TorusMap& f, const TorusSymbol& alpha,
                              const TorusSymbol& chi) {
  if (m.rows() != m.cols()) throw DimensionError("egorov_residual: map must be square");
  const int n = static_cast<int>(m.rows());
  const CMat lhs = m.adjoint() * weyl_quantize_torus(a, n) * m;
  const CMat rhs = weyl_quantize_torus(
      [&](double q, double p) {
        const auto [q1, p1] = f(q, p);
        return alpha(q, p) * a(q1 - std::floor(q1), p1 - std::floor(p1));
      },
      n);
  const CMat c = weyl_quantize_torus(chi, n);
  return spectral_norm(c * (lhs - rhs) * c);
}

}  // namespace poincarezeta
