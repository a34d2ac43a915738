#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "poincarezeta/phase_flow/escape.hpp"
#include "poincarezeta/poincare/return_map.hpp"
#include "poincarezeta/scaling/complex_scaling.hpp"
#include "poincarezeta/spectral/resonances.hpp"

namespace poincarezeta {

/// Round-trip decimal form of a double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// "# manifest: <hash>" first line of every artifact.
inline void write_artifact_header(std::ostream& os, const std::string& manifest_hash) {
  os << "# manifest: " << manifest_hash << '\n';
}

/// x1..xn,xi1..xin,escape_time
inline void write_trapped_csv(std::ostream& os, const TrappedSetSample& s) {
  if (s.points.empty()) return;
  const auto n = s.points.front().x.size();
  for (Eigen::Index j = 0; j < n; ++j) os << "x" << j + 1 << ',';
  for (Eigen::Index j = 0; j < n; ++j) os << "xi" << j + 1 << ',';
  os << "escape_time\n";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) os << fmt(s.points[i].x(j)) << ',';
    for (Eigen::Index j = 0; j < n; ++j) os << fmt(s.points[i].xi(j)) << ',';
    os << fmt(s.escape_times[i]) << '\n';
  }
}

/// k,i,rhoIn..,rhoOut..,tPlus,J.. (J row-major)
inline void write_atlas_csv(std::ostream& os, const ReturnMapAtlas& atlas) {
  if (atlas.records.empty()) return;
  const auto d = atlas.records.front().rho_in.size();
  os << "k,i";
  for (Eigen::Index j = 0; j < d; ++j) os << ",rho_in" << j + 1;
  for (Eigen::Index j = 0; j < d; ++j) os << ",rho_out" << j + 1;
  os << ",t_plus";
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) os << ",J" << a + 1 << b + 1;
  os << '\n';
  for (const auto& r : atlas.records) {
    os << r.from_section << ',' << r.to_section;
    for (Eigen::Index j = 0; j < d; ++j) os << ',' << fmt(r.rho_in(j));
    for (Eigen::Index j = 0; j < d; ++j) os << ',' << fmt(r.rho_out(j));
    os << ',' << fmt(r.t_plus);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) os << ',' << fmt(r.jacobian(a, b));
    os << '\n';
  }
}

/// re_z,im_z,multiplicity,residual
inline void write_resonances_csv(std::ostream& os, const ResonanceList& list) {
  os << "re_z,im_z,multiplicity,residual\n";
  for (const auto& r : list.zeros)
    os << fmt(r.z.real()) << ',' << fmt(r.z.imag()) << ',' << r.multiplicity << ',' << fmt(r.residual) << '\n';
}

/// re_z,im_z,multiplicity,residual,theta,Npts,L; one row per angle, the
/// residual column holding the largest move across angles.
inline void write_direct_resonances_csv(std::ostream& os, const DirectResonanceList& list) {
  os << "re_z,im_z,multiplicity,residual,theta,Npts,L\n";
  for (const auto& r : list.zeros)
    for (double t : list.thetas)
      os << fmt(r.z.real()) << ',' << fmt(r.z.imag()) << ",1," << fmt(r.theta_shift) << ',' << fmt(t) << ','
         << list.fine_points << ',' << fmt(list.half_width) << '\n';
}

/// row,col,re,im
inline void write_matrix_csv(std::ostream& os, const CMat& m) {
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << i << ',' << j << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag()) << '\n';
}

/// Generic table with a header row.
inline void write_table_csv(std::ostream& os, const std::vector<std::string>& columns,
                            const std::vector<std::vector<double>>& rows) {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << fmt(row[c]);
    os << '\n';
  }
}

}  // namespace poincarezeta
