// deltashell: reproduce the delta-shell pseudopotential pipelines as data
// files. Commands map to the standard figures of the problem: phase-shifts
// (scattering-length curves), dressed-beta, busch, box-toy, spectrum,
// resonances. Output is CSV/JSON only; every data file gets a manifest.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltashell/errors.hpp"
#include "deltashell/exactref.hpp"
#include "deltashell/freespace.hpp"
#include "deltashell/serialize.hpp"
#include "deltashell/trapbasis.hpp"
#include "deltashell/trapres.hpp"
#include "deltashell/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dshell;

namespace {

struct CommonOpts {
  double V0 = 498.8;
  double R0 = 0.1;
  double rs = 0.05;
  int lmax = 4;
  int interacting_lmax = 1;
  double ecut = 16.0;
  double dz_min = 0.0, dz_max = 3.0, dz_step = 0.05;
  std::string out = "out";
  std::string format = "csv";
  std::string config_file;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << content;
}

// Manifest alongside every data file: parameters, tolerances, version.
void write_manifest(const std::string& out_base, const std::string& command,
                    const json& params, const std::vector<std::string>& files) {
  json m;
  m["tool"] = "deltashell";
  m["version"] = kVersion;
  m["command"] = command;
  m["parameters"] = params;
  m["tolerances"] = {{"busch_nu", 1e-10},
                     {"self_consistency_residual", 1e-8},
                     {"biorthonormality", 1e-8},
                     {"imag_spectrum_rel", 1e-6}};
  m["outputs"] = files;
  write_file(out_base + ".manifest.json", m.dump(2) + "\n");
}

// Config file supplies values only where the flag was not given explicitly
// (flags override the file).
struct CommonOptionPtrs {
  CLI::Option *V0, *R0, *rs, *lmax, *ilmax, *ecut, *dz_min, *dz_max, *dz_step,
      *out, *format;
};

void apply_config_file(CommonOpts& o, const CommonOptionPtrs& p) {
  if (o.config_file.empty()) return;
  std::ifstream f(o.config_file);
  if (!f) throw std::invalid_argument("config file not found: " + o.config_file);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config file parse error: ") + e.what());
  }
  auto take = [&](const char* key, auto& field, CLI::Option* opt) {
    if (opt->count() == 0 && j.contains(key))
      field = j[key].get<std::decay_t<decltype(field)>>();
  };
  take("V0", o.V0, p.V0);
  take("R0", o.R0, p.R0);
  take("rs", o.rs, p.rs);
  take("lmax", o.lmax, p.lmax);
  take("interacting_lmax", o.interacting_lmax, p.ilmax);
  take("ecut", o.ecut, p.ecut);
  take("dz_min", o.dz_min, p.dz_min);
  take("dz_max", o.dz_max, p.dz_max);
  take("dz_step", o.dz_step, p.dz_step);
  take("out", o.out, p.out);
  take("format", o.format, p.format);
}

json common_params(const CommonOpts& o) {
  return {{"V0", o.V0},     {"R0", o.R0},         {"rs", o.rs},
          {"lmax", o.lmax}, {"ecut", o.ecut},     {"dz_min", o.dz_min},
          {"dz_max", o.dz_max}, {"dz_step", o.dz_step}};
}

int run_phase_shifts(const CommonOpts& o, double emin, double emax, int n) {
  freespace::SquareWell well{o.V0, o.R0};
  const std::string warn = freespace::validate(well);
  if (!warn.empty()) std::cerr << "warning: " << warn << "\n";
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = emin + (emax - emin) * i / (n - 1);
  std::vector<std::string> files;
  for (int l = 0; l <= std::min(o.lmax, o.interacting_lmax); ++l) {
    auto fn = freespace::sample_scattering_length(well, l, grid);
    const std::string path = o.out + "_l" + std::to_string(l) + ".csv";
    write_file(path, fn.to_csv());
    files.push_back(path);
  }
  json p = common_params(o);
  p["emin"] = emin;
  p["emax"] = emax;
  p["n"] = n;
  write_manifest(o.out, "phase-shifts", p, files);
  return 0;
}

int run_busch(const CommonOpts& o, int l, double E0, double beta_const,
              bool use_const) {
  trapbasis::BuschResult res;
  const double nu_lo = 0.5 * (-3.5 - l - 1.5);
  const double nu_hi = 0.5 * (o.ecut - l - 1.5);
  if (use_const) {
    res = trapbasis::busch_constant_beta(l, beta_const, nu_lo, nu_hi);
  } else {
    freespace::SquareWell well{o.V0, o.R0};
    auto spec = trapbasis::make_pseudopotential(
        l, o.rs, E0, [&](double E) { return freespace::beta_continued(well, l, E); });
    res = trapbasis::busch_eigenvalues(spec, nu_lo, nu_hi);
  }
  std::string csv = "nu,E\n";
  for (double nu : res.nu)
    csv += serialize::fmt(nu) + "," + serialize::fmt(2 * nu + l + 1.5) + "\n";
  const std::string path = o.out + ".csv";
  write_file(path, csv);
  for (const auto& d : res.diagnostics) std::cerr << "diagnostic: " << d << "\n";
  json p = common_params(o);
  p["l"] = l;
  p["E0"] = E0;
  p["beta_const"] = beta_const;
  p["const_beta_mode"] = use_const;
  write_manifest(o.out, "busch", p, {path});
  return 0;
}

int run_dressed_beta(const CommonOpts& o, int l, double E0,
                     std::vector<double> betas, double emin, double emax, int n) {
  if (betas.empty()) betas = {-5.0, 1.0, 10.0};
  std::string csv = "E";
  for (double b : betas) csv += ",beta_tilde[beta0=" + serialize::fmt(b) + "]";
  csv += "\n";
  std::vector<trapbasis::PseudopotentialSpec> specs;
  for (double b : betas)
    specs.push_back(trapbasis::make_pseudopotential(
        l, o.rs, E0, [b](double) { return b; }, trapbasis::Mode::trap));
  for (int i = 0; i < n; ++i) {
    const double E = emin + (emax - emin) * i / (n - 1);
    csv += serialize::fmt(E);
    for (const auto& s : specs)
      csv += "," + serialize::fmt(trapbasis::dressed_beta(s, E));
    csv += "\n";
  }
  const std::string path = o.out + ".csv";
  write_file(path, csv);
  json p = common_params(o);
  p["l"] = l;
  p["E0"] = E0;
  p["betas"] = betas;
  write_manifest(o.out, "dressed-beta", p, {path});
  return 0;
}

int run_box_toy(const CommonOpts& o, double u, double rs_frac, double L,
                int n_states, int samples) {
  auto states = exactref::box_toy(u, rs_frac * L, L, n_states);
  const std::string path = o.out + ".csv";
  write_file(path, serialize::box_toy_csv(states, samples));
  std::string ecsv = "n,k,E\n";
  for (size_t i = 0; i < states.size(); ++i)
    ecsv += std::to_string(i + 1) + "," + serialize::fmt(states[i].k) + "," +
            serialize::fmt(states[i].E) + "\n";
  const std::string epath = o.out + "_levels.csv";
  write_file(epath, ecsv);
  json p = common_params(o);
  p["u"] = u;
  p["rs_frac"] = rs_frac;
  p["L"] = L;
  p["n_states"] = n_states;
  write_manifest(o.out, "box-toy", p, {path, epath});
  return 0;
}

trapres::SweepConfig sweep_config(const CommonOpts& o, int n_states,
                                  const std::string& solver) {
  trapres::SweepConfig cfg;
  cfg.well = {o.V0, o.R0};
  cfg.basis.l_max = o.lmax;
  cfg.basis.interacting_l_max = o.interacting_lmax;
  cfg.basis.r_s = o.rs;
  cfg.basis.E_cut = o.ecut;
  cfg.dz_min = o.dz_min;
  cfg.dz_max = o.dz_max;
  cfg.dz_step = o.dz_step;
  cfg.n_states = n_states;
  cfg.solver = (solver == "exact") ? trapres::SweepConfig::Solver::exact
                                   : trapres::SweepConfig::Solver::pseudo;
  return cfg;
}

int run_spectrum(const CommonOpts& o, int n_states, const std::string& solver) {
  std::vector<std::string> files;
  std::vector<std::string> solvers;
  if (solver == "both") {
    solvers = {"pseudo", "exact"};
  } else {
    solvers = {solver};
  }
  for (const std::string& s : solvers) {
    auto curve = trapres::sweep_separation(sweep_config(o, n_states, s));
    const std::string path = o.out + "_" + s + ".csv";
    write_file(path, serialize::spectrum_csv(curve));
    files.push_back(path);
    for (const auto& w : curve.warnings) std::cerr << "warning: " << w << "\n";
  }
  json p = common_params(o);
  p["n_states"] = n_states;
  p["solver"] = solver;
  write_manifest(o.out, "spectrum", p, files);
  return 0;
}

int run_resonances(const CommonOpts& o, int n_states, const std::string& solver,
                   double gap_threshold) {
  auto curve = trapres::sweep_separation(sweep_config(o, n_states, solver));
  auto reps = trapres::find_resonances(curve, gap_threshold);
  const std::string path = o.out + ".json";
  write_file(path, serialize::resonances_json(reps));
  const std::string spath = o.out + "_spectrum.csv";
  write_file(spath, serialize::spectrum_csv(curve));
  json p = common_params(o);
  p["n_states"] = n_states;
  p["solver"] = solver;
  p["gap_threshold"] = gap_threshold;
  write_manifest(o.out, "resonances", p, {path, spath});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delta-shell pseudopotential toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  CommonOptionPtrs optr{};
  app.add_option("--config", o.config_file, "JSON config file (flags override)");
  optr.V0 = app.add_option("--V0", o.V0, "square-well depth (hbar*omega)");
  optr.R0 = app.add_option("--R0", o.R0, "square-well radius (z0)");
  optr.rs = app.add_option("--rs", o.rs, "delta-shell radius (z0)");
  optr.lmax = app.add_option("--lmax", o.lmax, "highest partial wave kept in bases");
  optr.ilmax = app.add_option("--interacting-lmax", o.interacting_lmax,
                              "highest partial wave with interactions");
  optr.ecut = app.add_option("--ecut", o.ecut, "basis energy cutoff (hbar*omega)");
  optr.dz_min = app.add_option("--dz-min", o.dz_min, "sweep start (z0)");
  optr.dz_max = app.add_option("--dz-max", o.dz_max, "sweep end (z0)");
  optr.dz_step = app.add_option("--dz-step", o.dz_step, "sweep step (z0)");
  optr.out = app.add_option("--out", o.out, "output path prefix");
  optr.format = app.add_option("--format", o.format,
                               "csv|json (where a choice exists)");

  auto* ps = app.add_subcommand("phase-shifts",
                                "scattering-length curves beta_l(E)");
  double emin = 0.01, emax = 14.0;
  int npts = 400;
  ps->add_option("--emin", emin);
  ps->add_option("--emax", emax);
  ps->add_option("--n", npts);

  auto* bu = app.add_subcommand("busch", "generalized Busch eigenvalues");
  int bl = 0;
  double bE0 = 1.0, bconst = 0.0;
  bool buse_const = false;
  bu->add_option("--l", bl);
  bu->add_option("--E0", bE0);
  bu->add_option("--beta", bconst, "constant bare scattering length");
  bu->add_flag("--const-beta", buse_const, "use the constant-beta equation");

  auto* db = app.add_subcommand("dressed-beta", "dressed scattering length curves");
  int dl = 0;
  double dE0 = 1.0, demin = -2.0, demax = 6.0;
  int dn = 800;
  std::vector<double> dbetas;
  db->add_option("--l", dl);
  db->add_option("--E0", dE0);
  db->add_option("--beta", dbetas, "bare beta values (repeatable)");
  db->add_option("--emin", demin);
  db->add_option("--emax", demax);
  db->add_option("--n", dn);

  auto* bt = app.add_subcommand("box-toy", "delta-shell-with-derivative in a box");
  double u = 1.0, rs_frac = 0.1, L = 1.0;
  int bns = 5, bsamples = 400;
  bt->add_option("--u", u);
  bt->add_option("--rs-frac", rs_frac);
  bt->add_option("--L", L);
  bt->add_option("--n-states", bns);
  bt->add_option("--samples", bsamples);

  auto* sp = app.add_subcommand("spectrum", "displaced-trap eigenspectrum sweep");
  int sns = 8;
  std::string ssolver = "both";
  sp->add_option("--n-states", sns);
  sp->add_option("--solver", ssolver, "pseudo|exact|both");

  auto* rs = app.add_subcommand("resonances", "locate trap-induced resonances");
  int rns = 8;
  std::string rsolver = "pseudo";
  double rgap = 0.2;
  rs->add_option("--n-states", rns);
  rs->add_option("--solver", rsolver, "pseudo|exact");
  rs->add_option("--gap-threshold", rgap);

  try {
    app.parse(argc, argv);
    apply_config_file(o, optr);

    if (ps->parsed()) return run_phase_shifts(o, emin, emax, npts);
    if (bu->parsed()) return run_busch(o, bl, bE0, bconst, buse_const);
    if (db->parsed()) return run_dressed_beta(o, dl, dE0, dbetas, demin, demax, dn);
    if (bt->parsed()) return run_box_toy(o, u, rs_frac, L, bns, bsamples);
    if (sp->parsed()) return run_spectrum(o, sns, ssolver);
    if (rs->parsed()) return run_resonances(o, rns, rsolver, rgap);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    std::ofstream diag("deltashell_diagnostic.txt");
    diag << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
