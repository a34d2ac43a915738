// poincarezeta command-line driver. Every subcommand first freezes its
// parameters into a RunManifest and then runs from the manifest alone, so
// `run --manifest` replays exactly the same computation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "poincarezeta.hpp"
#include "poincarezeta/io/manifest.hpp"

using namespace poincarezeta;

namespace {

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::set<int> parse_branches(const std::string& text) {
  std::set<int> out;
  for (double v : parse_doubles(text)) {
    if (v != static_cast<int>(v)) throw InvalidArgument("branch indices must be integers");
    out.insert(static_cast<int>(v));
  }
  return out;
}

SpectralWindow parse_window(const std::string& text) {
  const auto v = parse_doubles(text);
  if (v.size() != 4) throw InvalidArgument("window needs re_lo,re_hi,im_lo,im_hi");
  if (!(v[1] > v[0] && v[3] > v[2])) throw InvalidArgument("window is empty");
  return {v[0], v[1], v[2], v[3]};
}

double num(const RunManifest& m, const std::string& key) { return m.get(key).get<double>(); }
int integer(const RunManifest& m, const std::string& key) { return m.get(key).get<int>(); }
std::string str(const RunManifest& m, const std::string& key) { return m.get(key).get<std::string>(); }

// Artifact writer: header line first, then the payload; the output hash is
// recorded once the file is closed.
template <class Writer>
void write_artifact(RunManifest& m, const std::string& label, const std::string& path, Writer&& writer) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write " + path);
    write_artifact_header(os, m.identity_hash());
    writer(os);
  }
  m.record_output(label, path);
}

void write_binary(RunManifest& m, const std::string& label, const std::string& path, const CMat& a) {
  write_oqmx_file(path, a);
  m.record_output(label, path);
}

void run_flow(RunManifest& m) {
  const auto sys = three_bump(num(m, "sharpness"));
  const auto x = parse_doubles(str(m, "x")), xi = parse_doubles(str(m, "xi"));
  if (x.size() != 2 || xi.size() != 2) throw DimensionError("flow: x and xi need two components");
  const PhasePoint rho0(Eigen::Map<const Vec>(x.data(), 2), Eigen::Map<const Vec>(xi.data(), 2));
  const auto traj = integrate_trajectory(sys, rho0, num(m, "t"), num(m, "dt"), integer(m, "stride"));
  const double e0 = symbol(sys, rho0);
  double drift = 0.0;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const auto& p = traj.points[i];
    const double e = symbol(sys, p);
    drift = std::max(drift, std::abs(e - e0));
    rows.push_back({traj.times[i], p.x(0), p.x(1), p.xi(0), p.xi(1), e});
  }
  write_artifact(m, "trajectory", str(m, "out"), [&](std::ostream& os) {
    write_table_csv(os, {"t", "x1", "x2", "xi1", "xi2", "energy"}, rows);
  });
  std::cout << "points=" << rows.size() << " energy_drift=" << fmt(drift) << '\n';
}

void run_trapped(RunManifest& m) {
  const auto sys = three_bump(num(m, "sharpness"));
  TrappedGrid grid;
  grid.half_width = num(m, "box");
  grid.points_per_axis = integer(m, "points");
  grid.directions = integer(m, "directions");
  const auto sample = sample_trapped_set(sys, num(m, "energy"), grid, num(m, "threshold"), num(m, "dt"));
  write_artifact(m, "trapped", str(m, "out"), [&](std::ostream& os) { write_trapped_csv(os, sample); });
  std::cout << "trapped_points=" << sample.points.size() << '\n';
}

void run_section(RunManifest& m) {
  const auto sys = three_bump(num(m, "sharpness"));
  const double energy = num(m, "energy");
  const auto charts = three_bump_sections(sys, energy);
  CrossingOptions opt;
  opt.horizon = num(m, "horizon");
  const auto atlas = build_atlas(sys, charts, integer(m, "seeds"), energy, num(m, "dt"), opt);
  write_artifact(m, "atlas", str(m, "out"), [&](std::ostream& os) { write_atlas_csv(os, atlas); });
  const auto rep = symplectic_check(atlas);
  std::cout << "records=" << atlas.records.size() << " symplectic_error=" << fmt(rep.max_form_error) << '\n';
  for (std::size_t k = 0; k < atlas.successors.size(); ++k) {
    std::cout << "J+(" << k << ")=";
    bool first = true;
    for (int i : atlas.successors[k]) {
      std::cout << (first ? "" : ",") << i;
      first = false;
    }
    std::cout << '\n';
  }
}

void run_quantize(RunManifest& m) {
  const std::string model = str(m, "model");
  const int n = integer(m, "N");
  if (model == "baker") {
    const auto b = open_baker(n, parse_branches(str(m, "kept"))).block(0, 0);
    write_binary(m, "matrix", str(m, "out"), b);
    const CVec ev = eigenvalues(b);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < ev.size(); ++i) rows.push_back({ev(i).real(), ev(i).imag(), std::abs(ev(i))});
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& c) { return a[2] > c[2]; });
    write_artifact(m, "eigenvalues", str(m, "eig"),
                   [&](std::ostream& os) { write_table_csv(os, {"re", "im", "abs"}, rows); });
    std::cout << "max_abs_eigenvalue=" << fmt(rows.front()[2]) << " rank=" << numerical_rank(b) << '\n';
  } else if (model == "disk") {
    const auto pi = spectral_projector(disk_symbol(num(m, "r")), n, "disk");
    write_binary(m, "matrix", str(m, "out"), pi.pi);
    std::cout << "rank=" << pi.rank << (pi.gap_warning ? " gap_warning" : "") << '\n';
  } else {
    throw InvalidArgument("quantize: unknown model '" + model + "'");
  }
}

void run_zeta(RunManifest& m) {
  const std::string model = str(m, "model");
  CMat m0;
  double h = num(m, "h");
  if (model == "baker") {
    const int n = integer(m, "N");
    m0 = open_baker(n, parse_branches(str(m, "kept"))).block(0, 0);
    if (h <= 0.0) h = torus_h(n);
  } else if (model == "diag") {
    const auto d = parse_doubles(str(m, "diag"));
    if (d.empty() || d.size() % 2) throw InvalidArgument("zeta: --diag needs re,im pairs");
    m0 = CMat::Zero(static_cast<Eigen::Index>(d.size() / 2), static_cast<Eigen::Index>(d.size() / 2));
    for (std::size_t j = 0; j < d.size() / 2; ++j) m0(j, j) = Complex(d[2 * j], d[2 * j + 1]);
    if (h <= 0.0) throw InvalidArgument("zeta: --h must be positive for the diag model");
  } else {
    throw InvalidArgument("zeta: unknown model '" + model + "'");
  }
  const auto window = parse_window(str(m, "window"));
  const auto list = find_resonances(constant_time_zeta(m0, num(m, "T"), h), window);
  write_artifact(m, "resonances", str(m, "out"), [&](std::ostream& os) { write_resonances_csv(os, list); });
  std::cout << "zeros=" << list.zeros.size() << " total_multiplicity=" << list.total_multiplicity()
            << " boundary_count=" << list.boundary_count << '\n';
}

void run_grushin(RunManifest& m) {
  if (!m.get("selftest").get<bool>()) throw InvalidArgument("grushin: only --selftest is available");
  const auto r = grushin_selftest(static_cast<unsigned long>(integer(m, "seed")));
  std::cout << "schur " << r.schur_passed << "/" << r.schur_trials << " (worst " << fmt(r.schur_worst) << ")\n"
            << "index " << r.index_passed << "/" << r.index_trials << "\n"
            << "trace " << r.trace_passed << "/" << r.trace_trials << "\n";
  const std::string out = str(m, "out");
  if (!out.empty()) {
    write_artifact(m, "selftest", out, [&](std::ostream& os) {
      os << "suite,trials,passed\n"
         << "schur," << r.schur_trials << ',' << r.schur_passed << '\n'
         << "index," << r.index_trials << ',' << r.index_passed << '\n'
         << "trace," << r.trace_trials << ',' << r.trace_passed << '\n';
    });
  }
  if (r.schur_passed != r.schur_trials || r.index_passed != r.index_trials || r.trace_passed != r.trace_trials) {
    throw Error("SelftestFailure", ErrorClass::Numeric, "grushin: some self-test trials failed");
  }
}

void run_scale1d(RunManifest& m) {
  const auto v = smoothed_barrier(num(m, "V0"), num(m, "a"), num(m, "w"));
  const double h = num(m, "h");
  std::vector<double> thetas = parse_doubles(str(m, "thetas"));
  if (num(m, "M1") > 0.0) {
    const double base = log_scaled_angle(num(m, "M1"), h);
    thetas = {base, 1.25 * base, 1.5 * base};
  }
  DirectResonanceOptions opt;
  opt.half_width = num(m, "L");
  opt.radius = num(m, "R");
  opt.fine_points = integer(m, "Npts");
  opt.coarse_points = integer(m, "coarse");
  const auto list = resonances_direct(v, h, parse_window(str(m, "window")), thetas, opt);
  write_artifact(m, "resonances", str(m, "out"), [&](std::ostream& os) { write_direct_resonances_csv(os, list); });
  std::cout << "resonances=" << list.zeros.size() << '\n';
  for (const auto& r : list.zeros) {
    std::cout << fmt(r.z.real()) << ' ' << fmt(r.z.imag()) << " shift=" << fmt(r.theta_shift)
              << (r.near_sector ? " warning: near the rotated continuum" : "") << '\n';
  }
}

const std::map<std::string, void (*)(RunManifest&)>& runners() {
  static const std::map<std::string, void (*)(RunManifest&)> table{
      {"flow", run_flow},     {"trapped", run_trapped}, {"section", run_section}, {"quantize", run_quantize},
      {"zeta", run_zeta},     {"grushin", run_grushin}, {"scale1d", run_scale1d}};
  return table;
}

void execute(RunManifest& m, const std::string& manifest_path) {
  runners().at(m.command())(m);
  if (!manifest_path.empty()) m.save(manifest_path);
}

void replay(const std::string& path) {
  RunManifest recorded = RunManifest::load(path);
  if (!runners().count(recorded.command())) throw InvalidArgument("run: unknown command in manifest");
  const auto expected = recorded.output_hashes();
  RunManifest fresh = recorded;
  runners().at(fresh.command())(fresh);
  int mismatches = 0;
  for (const auto& [label, hash] : expected) {
    const auto now = fresh.get("output_hash." + label).get<std::string>();
    const bool same = now == hash;
    mismatches += !same;
    std::cout << label << ' ' << (same ? "identical" : "DIFFERENT") << ' ' << now << '\n';
  }
  if (mismatches) throw Error("ReplayMismatch", ErrorClass::Numeric, "run: replay produced different artifacts");
}

int report(const std::string& kind, ErrorClass cls, const std::string& message) {
  nlohmann::ordered_json rec;
  rec["error"] = kind;
  rec["class"] = cls == ErrorClass::Validation ? "validation" : "numeric";
  rec["exit_code"] = cls == ErrorClass::Validation ? 2 : 3;
  rec["message"] = message;
  std::cerr << rec.dump() << '\n';
  return rec["exit_code"].get<int>();
}

std::string default_manifest(const std::string& out) { return out + ".manifest.json"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poincarezeta: return maps, open quantum maps and resonances"};
  app.set_help_flag("--help", "print help");  // -h would clash with --h
  app.set_config("--config");
  app.require_subcommand(1);

  std::string manifest_out;
  auto add_manifest_flag = [&](CLI::App* sub) {
    sub->add_option("--manifest-out", manifest_out, "manifest path (default: <out>.manifest.json)");
  };

  // flow
  double sharpness = 4.0, t = 10.0, dt = 1e-3;
  std::string x = "0,0", xi = "1,0", out;
  long stride = 100;
  auto* flow = app.add_subcommand("flow", "integrate one trajectory of the three-bump system");
  flow->add_option("--sharpness", sharpness, "bump sharpness R");
  flow->add_option("--x", x, "initial position x1,x2");
  flow->add_option("--xi", xi, "initial momentum xi1,xi2");
  flow->add_option("--t", t, "flow time (negative runs backward)");
  flow->add_option("--dt", dt, "step size");
  flow->add_option("--stride", stride, "keep every stride-th step");
  flow->add_option("--out", out, "trajectory CSV")->required();
  add_manifest_flag(flow);

  // trapped
  double energy = 0.0, box = 1.0, threshold = 10.0;
  int points = 21, directions = 16;
  auto* trapped = app.add_subcommand("trapped", "sample the trapped set by escape times");
  trapped->add_option("--sharpness", sharpness, "bump sharpness R");
  trapped->add_option("--energy", energy, "energy E");
  trapped->add_option("--box", box, "half width of the position lattice");
  trapped->add_option("--points", points, "lattice points per axis");
  trapped->add_option("--directions", directions, "momentum directions");
  trapped->add_option("--threshold", threshold, "escape-time threshold");
  trapped->add_option("--dt", dt, "step size");
  trapped->add_option("--out", out, "trapped CSV")->required();
  add_manifest_flag(trapped);

  // section
  int seeds = 13;
  double horizon = 20.0;
  auto* section = app.add_subcommand("section", "build the return-map atlas on the six three-bump sections");
  section->add_option("--sharpness", sharpness, "bump sharpness R");
  section->add_option("--energy", energy, "energy E");
  section->add_option("--seeds", seeds, "seeds per chart axis");
  section->add_option("--dt", dt, "step size");
  section->add_option("--horizon", horizon, "maximal flow time to the next section");
  section->add_option("--out", out, "atlas CSV")->required();
  add_manifest_flag(section);

  // quantize
  std::string model = "baker", kept = "0,2", eig;
  int n = 81;
  double radius = 0.3;
  auto* quantize = app.add_subcommand("quantize", "quantize a model map or a projector symbol");
  quantize->add_option("--model", model, "baker | disk")->check(CLI::IsMember({"baker", "disk"}));
  quantize->add_option("--N", n, "matrix size");
  quantize->add_option("--kept", kept, "kept baker branches");
  quantize->add_option("--r", radius, "disk radius");
  quantize->add_option("--out", out, "OQMX matrix")->required();
  quantize->add_option("--eig", eig, "eigenvalue CSV (baker)");
  add_manifest_flag(quantize);

  // zeta
  std::string window = "-0.05,0.05,-0.02,0", diag = "0.5,0";
  double h = 0.0, period = 1.0;
  auto* zeta_cmd = app.add_subcommand("zeta", "zeros of det(I - exp(i z T/h) M0) in a window");
  zeta_cmd->add_option("--model", model, "baker | diag")->check(CLI::IsMember({"baker", "diag"}));
  zeta_cmd->add_option("--N", n, "baker size");
  zeta_cmd->add_option("--kept", kept, "kept baker branches");
  zeta_cmd->add_option("--diag", diag, "diagonal entries as re,im pairs");
  zeta_cmd->add_option("--h", h, "semiclassical parameter (default 1/(2 pi N) for baker)");
  zeta_cmd->add_option("--T", period, "return time");
  zeta_cmd->add_option("--window", window, "re_lo,re_hi,im_lo,im_hi");
  zeta_cmd->add_option("--out", out, "resonance CSV")->required();
  add_manifest_flag(zeta_cmd);

  // grushin
  bool selftest = false;
  int seed = 1;
  auto* grushin = app.add_subcommand("grushin", "Grushin problem checks");
  grushin->add_flag("--selftest", selftest, "run the randomized Schur, index and trace suites");
  grushin->add_option("--seed", seed, "random seed");
  grushin->add_option("--out", out, "optional summary CSV");
  add_manifest_flag(grushin);

  // scale1d
  double v0 = 1.5, half = 0.5, width = 0.05, L = 4.0, R = 1.0, m1 = 0.0;
  std::string thetas = "0.3,0.4,0.5";
  std::string scale_window = "0.3,0.8,-0.1,-1e-6";
  int npts = 3200, coarse = 700;
  double hs = 0.05;
  auto* scale = app.add_subcommand("scale1d", "resonances of a smoothed barrier by complex scaling");
  scale->add_option("--V0", v0, "barrier height");
  scale->add_option("--a", half, "barrier half width");
  scale->add_option("--w", width, "edge smoothing width");
  scale->add_option("--h", hs, "semiclassical parameter");
  scale->add_option("--thetas", thetas, "scaling angles");
  scale->add_option("--M1", m1, "use theta = M1 h log(1/h) x {1, 1.25, 1.5} when positive");
  scale->add_option("--window", scale_window, "re_lo,re_hi,im_lo,im_hi");
  scale->add_option("--L", L, "half width of the box");
  scale->add_option("--R", R, "scaling radius");
  scale->add_option("--Npts", npts, "fine grid points");
  scale->add_option("--coarse", coarse, "coarse grid points for candidates");
  scale->add_option("--out", out, "resonance CSV")->required();
  add_manifest_flag(scale);

  // run
  std::string replay_path;
  auto* run = app.add_subcommand("run", "replay a manifest and compare artifact hashes");
  run->add_option("--manifest", replay_path, "manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("UsageError", ErrorClass::Validation, e.what());
  }

  try {
    if (run->parsed()) {
      replay(replay_path);
      return 0;
    }
    RunManifest m;
    if (flow->parsed()) {
      m = RunManifest("flow");
      m.set("sharpness", sharpness);
      m.set("x", x);
      m.set("xi", xi);
      m.set("t", t);
      m.set("dt", dt);
      m.set("stride", stride);
    } else if (trapped->parsed()) {
      m = RunManifest("trapped");
      m.set("sharpness", sharpness);
      m.set("energy", energy);
      m.set("box", box);
      m.set("points", points);
      m.set("directions", directions);
      m.set("threshold", threshold);
      m.set("dt", dt);
    } else if (section->parsed()) {
      m = RunManifest("section");
      m.set("sharpness", sharpness);
      m.set("energy", energy);
      m.set("seeds", seeds);
      m.set("dt", dt);
      m.set("horizon", horizon);
    } else if (quantize->parsed()) {
      m = RunManifest("quantize");
      m.set("model", model);
      m.set("N", n);
      m.set("kept", kept);
      m.set("r", radius);
      if (model == "baker" && eig.empty()) eig = out + ".eig.csv";
      m.set("eig", eig);
    } else if (zeta_cmd->parsed()) {
      m = RunManifest("zeta");
      m.set("model", model);
      m.set("N", n);
      m.set("kept", kept);
      m.set("diag", diag);
      m.set("h", h);
      m.set("T", period);
      m.set("window", window);
    } else if (grushin->parsed()) {
      m = RunManifest("grushin");
      m.set("selftest", selftest);
      m.set("seed", seed);
    } else if (scale->parsed()) {
      m = RunManifest("scale1d");
      m.set("V0", v0);
      m.set("a", half);
      m.set("w", width);
      m.set("h", hs);
      m.set("thetas", thetas);
      m.set("M1", m1);
      m.set("window", scale_window);
      m.set("L", L);
      m.set("R", R);
      m.set("Npts", npts);
      m.set("coarse", coarse);
      m.set("profile", "quintic-smoothstep");
    }
    m.set("out", out);
    const std::string manifest_path = !manifest_out.empty() ? manifest_out : (out.empty() ? "" : default_manifest(out));
    m.set("manifest", manifest_path);
    execute(m, manifest_path);
    return 0;
  } catch (const Error& e) {
    return report(e.kind(), e.error_class(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return report("InvalidArgument", ErrorClass::Validation, std::string("manifest: ") + e.what());
  } catch (const std::exception& e) {
    return report("InternalError", ErrorClass::Numeric, e.what());
  }
}
