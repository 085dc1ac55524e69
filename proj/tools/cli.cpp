#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "boundpair/radiative.hpp"

#ifndef BOUNDPAIR_VERSION
#define BOUNDPAIR_VERSION "dev"
#endif

namespace boundpair::cli {

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + ": '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("malformed " + what + ": '" + s + "'");
  return v;
}

std::unique_ptr<CLI::App> make_app(RunConfig& c, std::string& grid_text, std::string& format_text) {
  auto owner = std::make_unique<CLI::App>("Two-photon bound states in a waveguide-coupled atom array", "boundpair");
  CLI::App& app = *owner;
  app.set_config("--config", "", "key=value file read before the flags; flags win");
  app.get_config_formatter_base()->valueSeparator('=');
  app.require_subcommand(1);
  app.add_option("--n-atoms", c.n_atoms, "number of atoms N")->check(CLI::Range(2, 120));
  app.add_option("--period", c.period12, "array period in units of lambda0/12 (magic period: 1.0)")
      ->check(CLI::Range(0.05, 5.9));
  app.add_option("--gamma0", c.gamma0, "single-atom decay rate")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid_text, "scan grid a:b:step");
  app.add_option("--out", c.out, "output file (default: standard output)");
  app.add_option("--cache", c.cache, "cache directory (default: $BOUNDPAIR_CACHE)");
  app.add_flag("--quick", c.quick, "reduced sizes for smoke tests");
  app.add_option("--threads", c.threads, "worker threads for scans")->check(CLI::Range(1, 256));
  app.add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--truncation", c.truncation, "relative-coordinate truncation M")->check(CLI::Range(10, 4000));
  app.add_option("--matrix", c.matrix, "dump-h: h0, h0-inverse, two-photon or relative")
      ->check(CLI::IsMember({"h0", "h0-inverse", "two-photon", "relative"}));
  app.add_option("--wavevector", c.wavevector, "dump-h relative: K in units of pi");
  app.set_version_flag("--version", BOUNDPAIR_VERSION);

  const std::vector<std::pair<std::string, std::string>> help = {
      {"spectrum", "all eigenstates of a small array with classification"},
      {"dispersion", "bound-pair dispersion; grid over K in units of pi"},
      {"mass", "effective mass at K = pi: closed form, k.p and finite difference; grid over the period"},
      {"period-scan", "most subradiant bound state versus period"},
      {"size-scan", "most subradiant bound state versus N; grid over N"},
      {"edge-profile", "emission amplitudes and dead-layer fit of the most subradiant bound state"},
      {"oscillations", "lifetime oscillations with N against the dispersion degeneracy"},
      {"dump-h", "print a Hamiltonian as (row, col, re, im) entries"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();
  return owner;
}

void validate(RunConfig& c) {
  if (c.command == "spectrum" && c.n_atoms && *c.n_atoms > 40)
    throw UsageError("spectrum keeps every eigenvector; use --n-atoms <= 40");
  if (c.grid) {
    for (double v : c.grid->values()) {
      if (c.command == "period-scan" && (v < 0.5 || v > 1.5))
        throw UsageError("period-scan grid must lie within [0.5, 1.5]");
      if ((c.command == "size-scan" || c.command == "oscillations") &&
          (v < 4 || v > 120 || std::abs(v - std::round(v)) > 1e-9))
        throw UsageError("size grid must hold integers within [4, 120]");
      if (c.command == "dispersion" && (v < 0.0 || v > 1.0))
        throw UsageError("dispersion grid is K/pi within [0, 1]");
    }
  }
}

std::string fmt(double x) { return format_double(x); }

Table matrix_table(const CMatrix& m) {
  Table t;
  t.columns = {"row", "col", "re", "im"};
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      t.add_row({static_cast<long long>(i + 1), static_cast<long long>(j + 1), m(i, j).real(), m(i, j).imag()});
  return t;
}

double period_or(const RunConfig& c, double fallback) { return c.period12.value_or(fallback); }
int atoms_or(const RunConfig& c, int full, int quick) { return c.n_atoms.value_or(c.quick ? quick : full); }
Grid grid_or(const RunConfig& c, Grid full, Grid quick) { return c.grid.value_or(c.quick ? quick : full); }

std::vector<int> int_values(const Grid& g) {
  std::vector<int> out;
  for (double v : g.values()) out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

Table cmd_spectrum(const RunConfig& c, std::ostream& log) {
  const auto params = ArrayParams::from_period12(atoms_or(c, 10, 6), period_or(c, 1.0), c.gamma0);
  const auto rep = solve_spectrum(params);
  Table t;
  t.columns = {"index", "re_eps", "im_eps", "decay", "classification", "near_weight", "com_spread", "residual"};
  long long i = 0;
  for (const auto& e : rep.entries)
    t.add_row({i++, e.state.energy.re, e.state.energy.im, -e.state.energy.im / params.gamma0(),
               std::string(to_string(e.cls.kind)), e.cls.near_weight, e.cls.com_spread, e.state.residual});
  t.metadata["params"] = params.describe();
  t.metadata["max_residual"] = fmt(rep.max_residual);
  log << params.describe() << ": " << rep.entries.size() << " states, max residual " << rep.max_residual << '\n';
  return t;
}

BoundSearch search_for(const RunConfig& c, int full, int quick) {
  BoundSearch s;
  s.truncation = c.truncation ? c.truncation : (c.quick ? quick : full);
  if (c.quick) s.check_convergence = false;
  return s;
}

Table cmd_dispersion(const RunConfig& c, std::ostream& log) {
  const auto params = ArrayParams::from_period12(2, period_or(c, 1.0), c.gamma0);
  const auto grid = grid_or(c, {0.5, 1.0, 0.01}, {0.8, 1.0, 0.02});
  std::vector<double> ks;
  for (double v : grid.values()) ks.push_back(v * kPi);
  const auto curve = compute_dispersion(params, ks, search_for(c, 200, 100));
  Table t;
  t.columns = {"k_over_pi", "energy", "imag", "truncation", "convergence"};
  for (const auto& s : curve.samples)
    t.add_row({s.K / kPi, s.energy, s.imag, static_cast<long long>(s.truncation), s.convergence});
  t.metadata["period12"] = fmt(params.period12());
  t.metadata["eps_pi"] = fmt(params.eps_pi());
  log << "period12 " << params.period12() << ": " << curve.samples.size() << " of " << ks.size()
      << " wavevectors on the bound branch\n";
  return t;
}

Table cmd_mass(const RunConfig& c, std::ostream& log) {
  std::vector<double> periods;
  if (c.grid)
    periods = c.grid->values();
  else
    periods = {period_or(c, 1.0)};
  const int kp_m = c.truncation ? c.truncation : (c.quick ? 200 : 400);
  const int fd_m = c.quick ? 100 : 200;
  Table t;
  t.columns = {"period12", "inv_mass_closed", "inv_mass_kp", "inv_mass_fd", "kp_deviation", "fd_deviation",
               "fd_error_estimate"};
  for (double p : periods) {
    const auto params = ArrayParams::from_period12(2, p, c.gamma0);
    const auto r = mass_report(params, kp_m, fd_m);
    t.add_row({p, r.inv_mass_closed, r.kp.inv_mass, r.fd.inv_mass, r.kp_deviation(), r.fd_deviation(),
               r.fd.error_estimate});
    log << "period12 " << p << ": 1/m closed " << r.inv_mass_closed << ", k.p " << r.kp.inv_mass << ", fd "
        << r.fd.inv_mass << '\n';
  }
  return t;
}

Table cmd_period_scan(const RunConfig& c, const StateCache* cache, std::ostream& log) {
  const int n = atoms_or(c, 80, 20);
  const auto grid = grid_or(c, {0.8, 1.2, 0.01}, {0.8, 1.2, 0.02});
  const auto scan = period_scan(n, grid.values(), {cache, c.threads, c.gamma0});
  Table t = scan_table(scan);
  t.metadata["n_atoms"] = std::to_string(n);
  if (const auto best = argmin_decay(scan)) {
    t.metadata["argmin_period12"] = fmt(*best);
    log << "N=" << n << ": longest-lived bound pair at period12 " << *best << '\n';
  } else {
    log << "N=" << n << ": no bound state on the grid\n";
  }
  return t;
}

Table cmd_size_scan(const RunConfig& c, const StateCache* cache, std::ostream& log) {
  const double p = period_or(c, 1.01);
  const auto sizes = int_values(grid_or(c, {20, 100, 1}, {10, 24, 1}));
  const auto scan = size_scan(p, sizes, {cache, c.threads, c.gamma0});
  Table t = scan_table(scan);
  t.metadata["period12"] = fmt(p);
  std::vector<double> decay;
  for (const auto& pt : scan.points)
    if (pt.ok) decay.push_back(pt.decay);
  log << "period12 " << p << ": " << decay.size() << " bound states, " << signal::count_local_extrema(decay)
      << " local extrema of the decay rate\n";
  return t;
}

Table cmd_edge_profile(const RunConfig& c, const StateCache* cache, std::ostream& log) {
  const auto params = ArrayParams::from_period12(atoms_or(c, 100, 24), period_or(c, 0.9), c.gamma0);
  const auto found = cached_most_subradiant_bound(params, cache);
  if (!found.state) throw SolverError("no bound state for " + params.describe());
  const auto prof = edge_profile(*found.state, params);
  const double inv_m = inv_mass_closed_form(params.phi(), params.gamma0());
  Table t;
  t.columns = {"site", "re_d", "im_d", "d2", "re_chi_diag", "im_chi_diag"};
  for (Eigen::Index r = 0; r < prof.d.size(); ++r)
    t.add_row({static_cast<long long>(r + 1), prof.d(r).real(), prof.d(r).imag(), std::norm(prof.d(r)),
               prof.chi_diag(r).real(), prof.chi_diag(r).imag()});
  t.metadata["params"] = params.describe();
  t.metadata["re_eps"] = fmt(found.state->energy.re);
  t.metadata["im_eps"] = fmt(found.state->energy.im);
  t.metadata["l_dead"] = fmt(prof.l_dead);
  t.metadata["max_d2"] = fmt(prof.max_d2);
  t.metadata["argmax_site"] = std::to_string(prof.argmax_site);
  t.metadata["standing_wave_correlation"] = fmt(standing_wave_correlation(prof.chi_diag, prof.l_dead));
  try {
    const auto fit = tunneling_fit(prof, inv_m, params);
    t.metadata["kappa_tilde"] = fmt(fit.kappa_tilde);
    t.metadata["barrier"] = fmt(fit.barrier);
    t.metadata["an_score"] = fmt(fit.an_score);
    log << params.describe() << ": eps " << found.state->energy.re << " " << found.state->energy.im
        << "i, l_dead " << prof.l_dead << ", kappa_tilde " << fit.kappa_tilde << ", U " << fit.barrier << '\n';
  } catch (const DomainError& e) {
    log << params.describe() << ": tunneling fit skipped (" << e.what() << ")\n";
  }
  return t;
}

Table cmd_oscillations(const RunConfig& c, const StateCache* cache, std::ostream& log) {
  const double p = period_or(c, 1.02);
  const auto sizes = int_values(grid_or(c, {20, 100, 1}, {10, 49, 1}));
  const auto scan = size_scan(p, sizes, {cache, c.threads, c.gamma0});
  const auto osc = oscillation_wavevector(scan);
  Table t;
  t.columns = {"n_atoms", "decay", "detrended_log_decay"};
  std::vector<double> decay;
  for (const auto& pt : scan.points)
    if (pt.ok) decay.push_back(pt.decay);
  for (std::size_t i = 0; i < osc.axis.size(); ++i) t.add_row({osc.axis[i], decay[i], osc.detrended[i]});
  t.metadata["period12"] = fmt(p);
  t.metadata["oscillation_detected"] = osc.detected ? "true" : "false";
  t.metadata["dk_osc_over_pi"] = fmt(osc.wavevector / kPi);
  t.metadata["dk_osc_width_over_pi"] = fmt(osc.width / kPi);
  t.metadata["amplitude"] = fmt(osc.amplitude);

  const auto params = ArrayParams::from_period12(2, p, c.gamma0);
  const auto search = search_for(c, 200, 100);
  const auto curve = zone_edge_dispersion(params, 0.01 * kPi, c.quick ? 31 : 51, search);
  const auto deg = degeneracy_wavevector(curve, params, search);
  if (deg.found) t.metadata["dk_disp_over_pi"] = fmt(deg.delta_k / kPi);
  if (deg.quartic_prediction) t.metadata["dk_quartic_over_pi"] = fmt(*deg.quartic_prediction / kPi);
  try {
    const auto q = quartic_fit(curve);
    t.metadata["alpha"] = fmt(q.alpha);
    t.metadata["inv_mass_fit"] = fmt(q.inv_mass);
  } catch (const DomainError&) {
  }
  log << "period12 " << p << ": oscillation " << (osc.detected ? "detected" : "not detected") << " at dK/pi "
      << osc.wavevector / kPi << "; dispersion root " << (deg.found ? fmt(deg.delta_k / kPi) : "none") << '\n';
  return t;
}

Table cmd_dump_h(const RunConfig& c, std::ostream& log) {
  const auto params = ArrayParams::from_period12(atoms_or(c, 6, 4), period_or(c, 1.0), c.gamma0);
  CMatrix m;
  if (c.matrix == "h0") {
    m = build_h0(params);
  } else if (c.matrix == "h0-inverse") {
    m = build_h0_inverse(params).dense();
  } else if (c.matrix == "two-photon") {
    if (params.n_atoms() > 30) throw UsageError("dump-h two-photon: use --n-atoms <= 30");
    m = build_two_photon_h(params, PairBasis(params.n_atoms()));
  } else {
    m = build_relative_h(c.wavevector * kPi, c.truncation ? c.truncation : 20, params).matrix;
  }
  log << c.matrix << ": " << m.rows() << "x" << m.cols() << '\n';
  Table t = matrix_table(m);
  t.metadata["params"] = params.describe();
  t.metadata["matrix"] = c.matrix;
  return t;
}

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> out;
  const double span = (stop - start) / step;
  const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
  for (long long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("grid must be a:b:step, got '" + text + "'");
  Grid g{parse_number(parts[0], "grid start"), parse_number(parts[1], "grid stop"), parse_number(parts[2], "grid step")};
  if (!(g.step > 0.0)) throw UsageError("grid step must be positive");
  if (g.stop < g.start) throw UsageError("grid stop must not be below its start");
  if ((g.stop - g.start) / g.step > 1e6) throw UsageError("grid has too many points");
  return g;
}

RunConfig parse_args(const std::vector<std::string>& args, const std::optional<std::string>& env_cache) {
  RunConfig c;
  std::string grid_text, format_text = "csv";
  auto app = make_app(c, grid_text, format_text);
  std::vector<const char*> argv{"boundpair"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app->parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  c.command = app->get_subcommands().front()->get_name();
  if (!grid_text.empty()) c.grid = parse_grid(grid_text);
  c.format = parse_format(format_text);
  if (c.cache.empty() && env_cache) c.cache = *env_cache;
  validate(c);
  return c;
}

std::string usage() {
  RunConfig c;
  std::string g, f;
  return make_app(c, g, f)->help();
}

void run(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<StateCache> cache;
  if (!c.cache.empty()) cache.emplace(c.cache);
  const StateCache* cp = cache ? &*cache : nullptr;

  Table t;
  if (c.command == "spectrum") t = cmd_spectrum(c, log);
  else if (c.command == "dispersion") t = cmd_dispersion(c, log);
  else if (c.command == "mass") t = cmd_mass(c, log);
  else if (c.command == "period-scan") t = cmd_period_scan(c, cp, log);
  else if (c.command == "size-scan") t = cmd_size_scan(c, cp, log);
  else if (c.command == "edge-profile") t = cmd_edge_profile(c, cp, log);
  else if (c.command == "oscillations") t = cmd_oscillations(c, cp, log);
  else if (c.command == "dump-h") t = cmd_dump_h(c, log);
  else throw UsageError("unknown subcommand " + c.command);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t.metadata["command"] = c.command;
  t.metadata["version"] = BOUNDPAIR_VERSION;
  t.metadata["wall_time_s"] = fmt(wall);
  if (!c.out.empty()) {
    write_table(t, c.format, c.out);
  } else {
    out << (c.format == Format::csv ? to_csv(t) : to_json(t));
    if (!out) throw IoError("cannot write to standard output");
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const char* env = std::getenv("BOUNDPAIR_CACHE");
  RunConfig config;
  try {
    config = parse_args(args, env && *env ? std::optional<std::string>(env) : std::nullopt);
  } catch (const CLI::CallForVersion&) {
    out << BOUNDPAIR_VERSION << '\n';
    return 0;
  } catch (const CLI::Success&) {
    out << usage();
    return 0;
  } catch (const UsageError& e) {
    err << "boundpair: " << e.what() << "\n\n" << usage();
    return 2;
  } catch (const DomainError& e) {
    err << "boundpair: " << e.what() << '\n';
    return 2;
  }
  try {
    run(config, out, err);
  } catch (const UsageError& e) {
    err << "boundpair: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "boundpair: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "boundpair: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "boundpair: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace boundpair::cli
