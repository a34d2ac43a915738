#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "poincarezeta/core/linalg.hpp"
#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// Bordered problem [[P, R_-], [R_+, 0]].
struct GrushinSystem {
  CMat p;        // n x n
  CMat r_minus;  // n x m (columns)
  CMat r_plus;   // m' x n (rows)

  GrushinSystem(CMat p_, CMat rm, CMat rp) : p(std::move(p_)), r_minus(std::move(rm)), r_plus(std::move(rp)) {
    if (p.rows() != p.cols()) throw DimensionError("GrushinSystem: P must be square");
    if (r_minus.rows() != p.rows()) throw DimensionError("GrushinSystem: R_- must have n rows");
    if (r_plus.cols() != p.cols()) throw DimensionError("GrushinSystem: R_+ must have n columns");
  }

  Eigen::Index n() const { return p.rows(); }
  bool square() const { return r_plus.rows() == r_minus.cols(); }

  CMat bordered() const {
    const auto n_ = n(), m = r_minus.cols(), mp = r_plus.rows();
    CMat b = CMat::Zero(n_ + mp, n_ + m);
    b.topLeftCorner(n_, n_) = p;
    b.topRightCorner(n_, m) = r_minus;
    b.bottomLeftCorner(mp, n_) = r_plus;
    return b;
  }
};

/// Blocks of the inverse [[E, E_+], [E_-, E_-+]].
struct EffectiveHamiltonian {
  CMat e;
  CMat e_plus;
  CMat e_minus;
  CMat e_minus_plus;
  double rcond = 0.0;  // reciprocal condition estimate of the bordered matrix
};

inline EffectiveHamiltonian schur_effective_hamiltonian(const GrushinSystem& sys) {
  if (!sys.square()) throw DimensionError("schur_effective_hamiltonian: rows(R_+) must equal cols(R_-)");
  const CMat b = sys.bordered();
  Eigen::PartialPivLU<CMat> lu(b);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = pivots.minCoeff() > 0.0 ? lu.rcond() : 0.0;
  if (!(rcond >= 1e-12)) throw SingularBorder("schur_effective_hamiltonian: bordered matrix is numerically singular");
  const CMat inv = lu.inverse();
  const auto n = sys.n(), m = sys.r_minus.cols();
  return {inv.topLeftCorner(n, n), inv.topRightCorner(n, m), inv.bottomLeftCorner(m, n),
          inv.bottomRightCorner(m, m), rcond};
}

struct SchurIdentityReport {
  double inverse_identity = 0.0;    // ||P^{-1} - (E - E_+ E_-+^{-1} E_-)|| / ||P^{-1}||
  double effective_identity = 0.0;  // ||E_-+^{-1} + R_+ P^{-1} R_-|| / ||E_-+^{-1}||
};

/// Both block-inverse identities; requires P and E_-+ invertible.
inline SchurIdentityReport verify_schur_identities(const GrushinSystem& sys) {
  const auto eff = schur_effective_hamiltonian(sys);
  Eigen::PartialPivLU<CMat> plu(sys.p);
  if (!(plu.rcond() >= 1e-12)) throw SingularBorder("verify_schur_identities: P is numerically singular");
  Eigen::PartialPivLU<CMat> elu(eff.e_minus_plus);
  if (!(elu.rcond() >= 1e-12)) throw SingularBorder("verify_schur_identities: E_-+ is numerically singular");
  const CMat pinv = plu.inverse();
  const CMat einv = elu.inverse();
  SchurIdentityReport rep;
  rep.inverse_identity = (pinv - (eff.e - eff.e_plus * einv * eff.e_minus)).norm() / pinv.norm();
  rep.effective_identity = (einv + sys.r_plus * pinv * sys.r_minus).norm() / einv.norm();
  return rep;
}

/// dim ker - dim coker from numerical ranks.
inline int matrix_index(const CMat& a, double tol = 1e-10) {
  int rank = 0;
  if (a.size() > 0) {
    const Vec s = singular_values(a);
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * std::max(1.0, s(0))) ++rank;
  }
  const auto rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
  return (cols - rank) - (rows - rank);
}

struct IndexReport {
  int bordered = 0;  // ind [[P, R_-], [R_+, 0]]
  int schur = 0;     // ind R_+ P^{-1} R_-
};

/// Index of the bordered operator and of the Schur complement; P must be invertible.
inline IndexReport index_check(const GrushinSystem& sys) {
  Eigen::PartialPivLU<CMat> plu(sys.p);
  if (!(plu.rcond() >= 1e-12)) throw InvalidArgument("index_check: P must be invertible");
  return {matrix_index(sys.bordered()), matrix_index(sys.r_plus * plu.solve(sys.r_minus))};
}

/// Family P(z) = A - z with constant borders.
struct GrushinPencil {
  CMat a;
  CMat r_minus;
  CMat r_plus;

  GrushinSystem at(Complex z) const {
    return GrushinSystem(a - z * CMat::Identity(a.rows(), a.cols()), r_minus, r_plus);
  }
};

struct CircleContour {
  Complex centre{0.0, 0.0};
  double radius = 1.0;
};

struct TraceFormulaResult {
  int lhs = 0;              // eigenvalues of A inside the contour
  int rhs = 0;              // winding of det E_-+
  int bordered_zeros = 0;   // winding of det of the bordered matrix
  double rhs_raw = 0.0;     // quadrature value before rounding
  int order = 0;            // quadrature nodes used
};

namespace detail {

// (1/2 pi i) contour integral of f over a circle by the trapezoidal rule with q nodes.
inline Complex circle_integral(const CircleContour& c, int q, const std::function<Complex(Complex)>& f) {
  Complex sum = 0.0;
  for (int j = 0; j < q; ++j) {
    const Complex w = std::polar(1.0, 2.0 * kPi * (j + 0.5) / q);
    const Complex z = c.centre + c.radius * w;
    sum += f(z) * c.radius * w;  // dz / (2 pi i) = r w dtheta / (2 pi)
  }
  return sum / static_cast<double>(q);
}

}  // namespace detail

/// Counts eigenvalues of A inside the contour directly and compares with the
/// winding of det E_-+(z) from tr E_-+^{-1} E_-+', E_-+' = E_- E_+.
inline TraceFormulaResult verify_trace_formula(const GrushinPencil& pencil, const CircleContour& contour,
                                               int initial_order = 64, int max_order = 4096) {
  if (!(contour.radius > 0.0)) throw InvalidArgument("verify_trace_formula: radius must be positive");
  TraceFormulaResult res;
  const CVec ev = Eigen::ComplexEigenSolver<CMat>(pencil.a, false).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i) - contour.centre) < contour.radius) ++res.lhs;

  auto effective_log_derivative = [&](Complex z) {
    const auto eff = schur_effective_hamiltonian(pencil.at(z));
    const CMat d = eff.e_minus * eff.e_plus;
    return Complex(eff.e_minus_plus.partialPivLu().solve(d).trace());
  };
  auto bordered_log_derivative = [&](Complex z) {
    // d/dz B = -diag(I, 0), so tr B^{-1} B' = -tr E
    return Complex(-schur_effective_hamiltonian(pencil.at(z)).e.trace());
  };
  auto converge = [&](const std::function<Complex(Complex)>& f, double& raw, int& used) {
    int q = initial_order;
    Complex prev = detail::circle_integral(contour, q, f);
    while (q < max_order) {
      q *= 2;
      const Complex next = detail::circle_integral(contour, q, f);
      if (std::abs(next - prev) < 1e-6 && std::abs(next.real() - std::round(next.real())) < 0.25) {
        raw = next.real();
        used = q;
        return static_cast<int>(std::lround(next.real()));
      }
      prev = next;
    }
    throw ContourTooClose("verify_trace_formula: quadrature did not settle on an integer");
  };
  double raw_b = 0.0;
  int used_b = 0;
  res.rhs = converge(effective_log_derivative, res.rhs_raw, res.order);
  res.bordered_zeros = converge(bordered_log_derivative, raw_b, used_b);
  return res;
}

/// Random pencil A = S D S^{-1} whose borders span the eigenvectors of the
/// eigenvalues inside the contour (plus one outside when none is inside), so
/// the bordered problem is invertible on the whole disk.
inline GrushinPencil well_posed_pencil(std::mt19937_64& rng, int n, const CircleContour& contour,
                                       double clearance = 1e-2) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVec d(n);
  std::vector<int> inside, outside;
  for (int i = 0; i < n; ++i) {
    Complex lam;
    do {
      lam = contour.centre + 2.0 * contour.radius * Complex(u(rng), u(rng));
    } while (std::abs(std::abs(lam - contour.centre) - contour.radius) < clearance);
    d(i) = lam;
    (std::abs(lam - contour.centre) < contour.radius ? inside : outside).push_back(i);
  }
  if (inside.empty() && outside.empty()) throw InvalidArgument("well_posed_pencil: n must be positive");
  std::vector<int> chosen = inside.empty() ? std::vector<int>{outside.front()} : inside;
  CMat s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = Complex(g(rng), g(rng));
  s += 2.0 * std::sqrt(static_cast<double>(n)) * CMat::Identity(n, n);
  const CMat sinv = s.inverse();
  const auto m = static_cast<Eigen::Index>(chosen.size());
  CMat gm(m, m), gp(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      gm(i, j) = Complex(g(rng), g(rng));
      gp(i, j) = Complex(g(rng), g(rng));
    }
  gm += 2.0 * CMat::Identity(m, m);
  gp += 2.0 * CMat::Identity(m, m);
  CMat s_in(n, m), sinv_in(m, n);
  for (Eigen::Index c = 0; c < m; ++c) {
    s_in.col(c) = s.col(chosen[static_cast<std::size_t>(c)]);
    sinv_in.row(c) = sinv.row(chosen[static_cast<std::size_t>(c)]);
  }
  return {s * d.asDiagonal() * sinv, s_in * gm, gp * sinv_in};
}

}  // namespace poincarezeta
