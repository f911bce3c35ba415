// ginibre_lab: CSV/JSON command-line front end for the ginilab library.
//
// Subcommands:
//   density      spectral densities of Y^z and H^z on an energy grid
//   onepoint     expected resolvent trace via contour | saddle | rescaled | real
//   mc           Monte Carlo sampling of the smallest eigenvalue of Y^z
//   besselcheck  limiting-kernel diagonal vs pi^{-1} Im q0 cross-check
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ginilab/ginilab.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Write content to path atomically (temp file in the same directory + rename).
void atomic_write(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

std::vector<double> make_grid(double lo, double hi, int n, bool log_grid) {
  if (n < 1) throw ginilab::DomainError("grid needs at least one point");
  if (log_grid && (lo <= 0.0 || hi <= 0.0))
    throw ginilab::DomainError("log grid requires positive endpoints");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / (n - 1);
    g[i] = log_grid ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
  }
  return g;
}

struct ManifestInfo {
  std::string subcommand;
  json params;
  std::uint64_t master_seed = 0;
  std::vector<std::string> outputs;
};

void write_manifest(const ManifestInfo& info, double wall_seconds) {
  json m;
  m["subcommand"] = info.subcommand;
  m["params"] = info.params;
  m["master_seed"] = info.master_seed;
  m["tool_version"] = kVersion;
  m["wall_time_seconds"] = wall_seconds;
  m["output_files"] = info.outputs;
  if (info.outputs.empty()) return;
  atomic_write(info.outputs.front() + ".manifest.json", m.dump(2) + "\n");
}

void write_gnuplot_hints(const std::string& csv_path, const std::string& plot_cmd) {
  std::ostringstream s;
  s << "# gnuplot companion script for " << csv_path << "\n"
    << "# usage: gnuplot " << csv_path << ".gnuplot\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << plot_cmd << "\n";
  atomic_write(csv_path + ".gnuplot", s.str());
}

// ---------------------------------------------------------------------------

struct CommonGrid {
  double e_min = 0.0, e_max = 1.0;
  int e_points = 101;
  bool log_grid = false;
};

int run_density(double delta, const CommonGrid& grid, const std::string& out,
                bool gnuplot_hints, ManifestInfo& info) {
  if (delta >= 1.0) throw ginilab::DomainError("density: requires delta < 1");
  if (grid.e_min < 0.0) throw ginilab::DomainError("density: requires e-min >= 0");
  ginilab::ShiftParams p{2, ginilab::Complex{std::sqrt(1.0 - delta), 0.0}};
  std::vector<double> es = make_grid(grid.e_min, grid.e_max, grid.e_points, grid.log_grid);
  std::ostringstream csv;
  csv << "E,rho_Y,rho_H\n";
  for (double E : es) {
    double rho_y = ginilab::density(E, p);
    double v = std::sqrt(std::max(E, 0.0));
    double rho_h = ginilab::solve_mde_h_boundary(v, p).m.imag() / ginilab::kPi;
    csv << fmt17(E) << "," << fmt17(rho_y) << "," << fmt17(rho_h) << "\n";
  }
  atomic_write(out, csv.str());
  info.outputs.push_back(out);
  if (gnuplot_hints)
    write_gnuplot_hints(out, "plot '" + out + "' using 1:2 with lines, '' using 1:3 with lines");
  return 0;
}

int run_onepoint(int n, double z_re, double z_im, double delta, const CommonGrid& grid,
                 const std::string& method, double tol_abs, double tol_rel,
                 const std::string& out, bool gnuplot_hints, ManifestInfo& info) {
  if (method != "contour" && method != "saddle" && method != "rescaled" && method != "real")
    throw ginilab::DomainError("onepoint: unknown method " + method);
  if (n < 1) throw ginilab::DomainError("onepoint: requires n >= 1");
  // Usage-level validation up front so bad parameters abort before any output.
  if (method != "rescaled") ginilab::ShiftParams{n, {z_re, z_im}};
  std::vector<double> es = make_grid(grid.e_min, grid.e_max, grid.e_points, grid.log_grid);
  std::ostringstream csv;
  csv << "E,Re,Im,abs_err\n";
  int ok_rows = 0;
  for (double E : es) {
    ginilab::Complex v{std::nan(""), std::nan("")};
    double err = std::nan("");
    try {
      if (method == "contour") {
        ginilab::ShiftParams p{n, {z_re, z_im}};
        ginilab::QuadResult q = ginilab::trace_resolvent_complex(
            p, E, ginilab::SpectralSide::plus_i0, tol_abs, tol_rel);
        v = q.value;
        err = q.abs_err;
      } else if (method == "saddle") {
        ginilab::ShiftParams p{n, {z_re, z_im}};
        ginilab::SaddleAsymptotics s = ginilab::saddle_asymptotics(p, E);
        v = s.value;
        err = std::abs(s.value) * s.error_bound;
      } else if (method == "rescaled") {
        // E column carries the rescaled spectral parameter lambda;
        // --delta carries the rescaled shift.
        ginilab::QuadResult r = ginilab::rescaled_onepoint(E, delta, n, tol_abs, tol_rel);
        v = r.value;
        err = r.abs_err;
      } else {
        ginilab::ShiftParams p{n, {z_re, z_im}};
        ginilab::QuadResult q = ginilab::trace_resolvent_real(p, E);
        v = q.value;
        err = q.abs_err;
      }
      ++ok_rows;
    } catch (const ginilab::RegimeError& e) {
      std::cerr << "warning: E=" << E << ": " << e.what() << " (row set to NaN)\n";
    } catch (const ginilab::NumericError& e) {
      std::cerr << "warning: E=" << E << ": " << e.what() << " (row set to NaN)\n";
    }
    csv << fmt17(E) << "," << fmt17(v.real()) << "," << fmt17(v.imag()) << ","
        << fmt17(err) << "\n";
  }
  atomic_write(out, csv.str());
  info.outputs.push_back(out);
  if (gnuplot_hints)
    write_gnuplot_hints(out, "plot '" + out + "' using 1:3 with lines");
  return ok_rows > 0 ? 0 : 1;
}

int run_mc(int n, double z_re, double z_im, long samples, std::uint64_t seed,
           const std::string& symmetry, const std::string& out, bool gnuplot_hints,
           ManifestInfo& info) {
  if (samples < 1) throw ginilab::DomainError("mc: requires samples >= 1");
  if (symmetry != "real" && symmetry != "complex")
    throw ginilab::DomainError("mc: symmetry must be real or complex");
  ginilab::ShiftParams p{n, {z_re, z_im}};
  ginilab::EnsembleSpec spec{p, symmetry == "complex"
                                    ? ginilab::SymmetryClass::complex_entries
                                    : ginilab::SymmetryClass::real_entries};
  std::vector<ginilab::TailSample> samp =
      ginilab::sample_lambda1_batch(spec, seed, static_cast<std::uint64_t>(samples));

  std::ostringstream per;
  per << "sample_index,lambda1\n";
  for (const auto& s : samp)
    per << s.index << "," << fmt17(s.lambda1) << "\n";
  atomic_write(out, per.str());
  info.outputs.push_back(out);

  // Summary over the canonically rescaled variable x = lambda1 / c(N, z).
  std::vector<double> rescaled;
  rescaled.reserve(samp.size());
  for (const auto& s : samp) rescaled.push_back(s.rescaled);
  ginilab::EmpiricalCdf cdf(rescaled);
  auto reference = [&](double x) { return ginilab::edelman_cdf(x, spec.symmetry); };
  double ks = ginilab::ks_distance(cdf, reference);
  double xlo = std::max(cdf.sorted.front() * 0.5, 1e-8);
  double xhi = cdf.sorted.back() * 1.2;
  std::vector<double> xs = make_grid(xlo, xhi, 200, true);
  std::ostringstream sum;
  sum << "x,empirical_cdf,reference_cdf,corollary_bound,ks\n";
  for (double x : xs) {
    sum << fmt17(x) << "," << fmt17(cdf(x)) << "," << fmt17(reference(x)) << ","
        << fmt17(ginilab::corollary_bound(x, p, spec.symmetry)) << "," << fmt17(ks)
        << "\n";
  }
  std::filesystem::path sp(out);
  std::filesystem::path summary = sp.parent_path() / (sp.stem().string() + "_summary" +
                                                      (sp.has_extension()
                                                           ? sp.extension().string()
                                                           : std::string(".csv")));
  atomic_write(summary.string(), sum.str());
  info.outputs.push_back(summary.string());
  if (gnuplot_hints)
    write_gnuplot_hints(summary.string(),
                        "set logscale x\nplot '" + summary.string() +
                            "' using 1:2 with lines, '' using 1:3 with lines, '' using "
                            "1:4 with lines");
  return 0;
}

int run_besselcheck(const CommonGrid& grid, const std::string& out, bool gnuplot_hints,
                    ManifestInfo& info) {
  std::vector<double> lams = make_grid(grid.e_min, grid.e_max, grid.e_points, true);
  std::ostringstream csv;
  csv << "lambda,K_diag,Im_q0_over_pi,rel_diff\n";
  double max_rel = 0.0;
  int ok_rows = 0;
  for (double lam : lams) {
    double kd = std::nan(""), iq = std::nan(""), rd = std::nan("");
    try {
      kd = ginilab::limiting_kernel(lam, lam).value;
      iq = ginilab::q0(lam).imag() / ginilab::kPi;
      rd = std::abs(kd - iq) / std::abs(kd);
      max_rel = std::max(max_rel, rd);
      ++ok_rows;
    } catch (const ginilab::NumericError& e) {
      std::cerr << "warning: lambda=" << lam << ": " << e.what() << " (row set to NaN)\n";
    }
    csv << fmt17(lam) << "," << fmt17(kd) << "," << fmt17(iq) << "," << fmt17(rd) << "\n";
  }
  atomic_write(out, csv.str());
  info.outputs.push_back(out);
  if (gnuplot_hints)
    write_gnuplot_hints(out, "set logscale x\nplot '" + out +
                                 "' using 1:2 with lines, '' using 1:3 with points");
  std::cout << "max rel_diff = " << fmt17(max_rel) << "\n";
  return ok_rows > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shifted Ginibre resolvent laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  int n = 2;
  double z_re = 1.0, z_im = 0.0, delta = 0.0;
  CommonGrid grid;
  long samples = 1000;
  std::uint64_t seed = 1;
  std::string method = "contour", symmetry = "complex", out;
  double tol_abs = 1e-10, tol_rel = 1e-10;
  bool gnuplot_hints = false;

  auto add_grid = [&](CLI::App* c) {
    c->add_option("--e-min", grid.e_min, "grid start");
    c->add_option("--e-max", grid.e_max, "grid end");
    c->add_option("--e-points", grid.e_points, "grid size");
    c->add_flag("--log-grid", grid.log_grid, "use a logarithmic grid");
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", out, "output CSV path")->required();
    c->add_flag("--gnuplot-hints", gnuplot_hints, "emit a companion gnuplot script");
  };

  CLI::App* cd = app.add_subcommand("density", "spectral densities of Y^z and H^z");
  cd->add_option("--delta", delta, "shift parameter delta = 1 - |z|^2")->required();
  add_grid(cd);
  add_out(cd);

  CLI::App* co = app.add_subcommand("onepoint", "expected resolvent trace");
  co->add_option("--n", n, "matrix dimension N")->required();
  co->add_option("--z-re", z_re, "Re z");
  co->add_option("--z-im", z_im, "Im z");
  co->add_option("--delta", delta, "rescaled shift (method=rescaled only)");
  co->add_option("--method", method, "contour | saddle | rescaled | real");
  co->add_option("--tol-abs", tol_abs, "absolute quadrature tolerance");
  co->add_option("--tol-rel", tol_rel, "relative quadrature tolerance");
  add_grid(co);
  add_out(co);

  CLI::App* cm = app.add_subcommand("mc", "smallest-eigenvalue Monte Carlo");
  cm->add_option("--n", n, "matrix dimension N")->required();
  cm->add_option("--z-re", z_re, "Re z");
  cm->add_option("--z-im", z_im, "Im z");
  cm->add_option("--samples", samples, "number of samples")->required();
  cm->add_option("--seed", seed, "master seed");
  cm->add_option("--symmetry", symmetry, "real | complex");
  add_out(cm);

  CLI::App* cb = app.add_subcommand("besselcheck", "kernel diagonal vs q0 cross-check");
  grid.e_min = 0.1;
  grid.e_max = 10.0;
  grid.e_points = 25;
  add_grid(cb);
  add_out(cb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  ManifestInfo info;
  info.master_seed = seed;
  int rc = 0;
  try {
    if (cd->parsed()) {
      info.subcommand = "density";
      info.params = {{"delta", delta},
                     {"e_min", grid.e_min},
                     {"e_max", grid.e_max},
                     {"e_points", grid.e_points},
                     {"log_grid", grid.log_grid},
                     {"out", out}};
      rc = run_density(delta, grid, out, gnuplot_hints, info);
    } else if (co->parsed()) {
      info.subcommand = "onepoint";
      info.params = {{"n", n},         {"z_re", z_re},
                     {"z_im", z_im},   {"delta", delta},
                     {"method", method}, {"e_min", grid.e_min},
                     {"e_max", grid.e_max}, {"e_points", grid.e_points},
                     {"log_grid", grid.log_grid}, {"tol_abs", tol_abs},
                     {"tol_rel", tol_rel}, {"out", out}};
      rc = run_onepoint(n, z_re, z_im, delta, grid, method, tol_abs, tol_rel, out,
                        gnuplot_hints, info);
    } else if (cm->parsed()) {
      info.subcommand = "mc";
      info.params = {{"n", n},       {"z_re", z_re},       {"z_im", z_im},
                     {"samples", samples}, {"seed", seed}, {"symmetry", symmetry},
                     {"out", out}};
      rc = run_mc(n, z_re, z_im, samples, seed, symmetry, out, gnuplot_hints, info);
    } else if (cb->parsed()) {
      info.subcommand = "besselcheck";
      info.params = {{"lambda_min", grid.e_min},
                     {"lambda_max", grid.e_max},
                     {"lambda_points", grid.e_points},
                     {"out", out}};
      rc = run_besselcheck(grid, out, gnuplot_hints, info);
    }
  } catch (const ginilab::DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ginilab::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(info, wall);
  return rc;
}
