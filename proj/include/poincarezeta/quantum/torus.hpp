#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "poincarezeta/core/parallel.hpp"
#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// Symbol a(y, eta) on the unit torus cell.
using TorusSymbol = std::function<double(double, double)>;

/// h = 1/(2 pi N).
inline double torus_h(int n) { return 1.0 / (2.0 * kPi * n); }

/// Position grid y_j = (j + 1/2)/N.
inline double torus_point(int j, int n) { return (j + 0.5) / n; }

/// Weyl quantization on the N-point torus grid y_j = (j+1/2)/N with
/// antiperiodic wrap, so that momentum-only symbols are diagonalized by the
/// half-shifted DFT. With a_n(y) the n-th Fourier coefficient of a in eta,
/// (Op a)_{jk} = sum_r (-1)^r a_{k-j+rN}((y_j + y_k)/2 + r/2); the sum keeps the
/// two representatives of k - j mod N in (-N, N].
inline CMat weyl_quantize_torus(const TorusSymbol& a, int n) {
  if (n < 2) throw InvalidArgument("weyl_quantize_torus: N must be >= 2");
  const int m2 = 2 * n;
  // samples(m, l) = a(y_m, eta_l), y_m = (m+1)/(2N) mod 1, eta_l = (l+1/2)/(2N)
  Mat samples(m2, m2);
  parallel_for(static_cast<std::size_t>(m2), [&](std::size_t mm) {
    const auto m = static_cast<Eigen::Index>(mm);
    const double y = std::fmod((static_cast<double>(m) + 1.0) / m2, 1.0);
    for (int l = 0; l < m2; ++l) samples(m, l) = a(y, (l + 0.5) / m2);
  });
  // phases(l, c) = exp(-2 pi i n_c eta_l)/(2N), n_c = c - N + 1 in (-N, N]
  CMat phases(m2, m2);
  for (int l = 0; l < m2; ++l)
    for (int c = 0; c < m2; ++c) phases(l, c) = std::polar(1.0 / m2, -2.0 * kPi * (c - n + 1) * (l + 0.5) / m2);
  auto coefficient = [&](int m, int freq) {
    return samples.row(m).cast<Complex>().dot(phases.col(freq + n - 1).conjugate());
  };
  CMat op(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int k = 0; k < n; ++k) {
      const int d = k - j;
      const int mid = j + k, shifted = (j + k + n) % m2;
      Complex v = coefficient(mid, d);
      if (d > 0) v -= coefficient(shifted, d - n);
      else if (d < 0) v -= coefficient(shifted, d + n);
      else v -= coefficient(shifted, n).real();  // a_N and a_{-N} alias; for real a they are conjugate
      op(j, k) = v;
    }
  });
  return op;
}

/// Diagonal quantization of a position-only symbol f(y).
inline CMat quantize_position(const std::function<Complex(double)>& f, int n) {
  CVec d(n);
  for (int j = 0; j < n; ++j) d(j) = f(torus_point(j, n));
  return d.asDiagonal();
}

/// Smooth 0 -> 1 cosine ramp on [0, 1].
inline double cosine_ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 - 0.5 * std::cos(kPi * t);
}

/// Window on [0, 1]: zero near both ends, identically one on [1.5 w, 1 - 1.5 w].
inline double cosine_taper(double u, double w) {
  return cosine_ramp(u / w - 0.5) * cosine_ramp((1.0 - u) / w - 0.5);
}

struct SpectralProjector {
  CMat pi;
  int rank = 0;
  std::string source;
  bool gap_warning = false;     // an eigenvalue of Op(q) lies within 1e-8 of 0
  double smallest_gap = 0.0;    // min |eigenvalue|
};

/// Projector onto the negative spectrum of the Hermitian matrix q.
inline SpectralProjector negative_projector(const CMat& q, std::string source = {}) {
  if (q.rows() != q.cols()) throw DimensionError("spectral_projector: matrix must be square");
  const CMat herm = 0.5 * (q + q.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm);
  if (es.info() != Eigen::Success) throw InvalidArgument("spectral_projector: eigensolver failed");
  const Vec& ev = es.eigenvalues();
  SpectralProjector out;
  out.source = std::move(source);
  out.smallest_gap = ev.cwiseAbs().minCoeff();
  out.gap_warning = out.smallest_gap < 1e-8;
  int r = 0;
  while (r < ev.size() && ev(r) < 0.0) ++r;
  out.rank = r;
  const CMat v = es.eigenvectors().leftCols(r);
  out.pi = v * v.adjoint();
  return out;
}

/// Projector onto the negative spectrum of the torus quantization of q.
inline SpectralProjector spectral_projector(const TorusSymbol& q, int n, std::string source = {}) {
  return negative_projector(weyl_quantize_torus(q, n), std::move(source));
}

/// q(y, eta) = (y - c)^2 + (eta - c)^2 - r^2 with c = 1/2: negative on a disk in the cell.
inline TorusSymbol disk_symbol(double r) {
  return [r](double y, double eta) { return (y - 0.5) * (y - 0.5) + (eta - 0.5) * (eta - 0.5) - r * r; };
}

/// Least-squares slope of log(values) against log(abscissae).
inline double loglog_slope(const std::vector<double>& abscissae, const std::vector<double>& values) {
  if (abscissae.size() != values.size() || abscissae.size() < 2) {
    throw InvalidArgument("loglog_slope: need at least two matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(abscissae.size());
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (!(abscissae[i] > 0) || !(values[i] > 0)) throw InvalidArgument("loglog_slope: nonpositive data");
    const double x = std::log(abscissae[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace poincarezeta
