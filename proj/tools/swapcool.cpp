// Command-line front end: presets, scans, resonance tables and dressed-state
// sweeps. Errors are reported as JSON on stderr with a nonzero exit code.

#include "swapcool/harness.hpp"
#include "swapcool/resonance.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace swapcool;
using nlohmann::json;

namespace {

int fail(const std::string& type, const std::string& message, int code = 1) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
  return code;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct Global {
  std::optional<std::uint64_t> seed;
  std::optional<int> n_traj;
  std::optional<int> workers;
  std::string outdir;
};

struct RunArgs {
  std::string preset;
  std::string config;
  std::vector<std::string> set;
  bool dump = false;
  std::vector<int> momenta;
  std::vector<std::string> levels;
};

RunConfig build_config(const RunArgs& a, const Global& g) {
  RunConfig c;
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw std::runtime_error("cannot read config file '" + a.config + "'");
    c = json::parse(f).get<RunConfig>();
  } else if (!a.preset.empty()) {
    c = preset(a.preset);
  } else {
    throw std::invalid_argument("either --preset or --config is required");
  }
  apply_overrides(c, a.set);
  if (!a.momenta.empty()) c.momenta = a.momenta;
  if (!a.levels.empty()) c.levels = a.levels;
  if (g.seed) c.seed = *g.seed;
  if (g.n_traj) c.n_traj = *g.n_traj;
  if (g.workers) c.workers = *g.workers;
  return c;
}

int execute(const RunConfig& c, const Global& g, bool dump) {
  if (dump) {
    std::cout << json(c).dump(2) << '\n';
    return 0;
  }
  const auto out = run_config(c, g.outdir);
  std::cout << json{{"files", out.files}}.dump() << '\n';
  return 0;
}

void analytic_table(double omega0, double alpha, double gamma, int p_min, int p_max,
                    const std::string& level) {
  const DriveParams params{omega0, gamma};
  const InternalLevel lv = parse_level(level);
  const auto adi = adiabaticity(omega0, alpha);
  std::cout << "p_i,kv,t_right,t_left,tau_res,tau_jump,kappa,lz_probability,high_velocity,"
               "doppleron\n";
  for (int p = p_min; p <= p_max; ++p) {
    const double kv = units::doppler_shift(p);
    const auto r = predict(lv, p, params, alpha);
    std::cout << p << ',' << num(kv) << ',' << num(r.times.t_right) << ','
              << num(r.times.t_left) << ',' << num(r.tau_res) << ',' << num(r.tau_jump) << ','
              << num(adi.kappa) << ',' << num(lz_probability(omega0, alpha)) << ','
              << (r.flags.high_velocity ? 1 : 0) << ',' << (r.flags.doppleron ? 1 : 0) << '\n';
  }
}

void dressed_table(double omega0, int p, double lo, double hi, int samples, bool diabatic) {
  const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(std::max(2, samples), lo, hi);
  const auto s = dressed_sweep(DriveParams{omega0, 0.0}, p, d, diabatic);
  std::cout << "delta,E0,E1,E2,E3,bare_g_p,bare_e_pm1,bare_g_pm2,bare_e_pm3\n";
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const Eigen::Vector4d bare = bare_four_state_energies(d(k), p);
    std::cout << num(d(k));
    for (int b = 0; b < 4; ++b) std::cout << ',' << num(s.eigenvalues(k, b));
    for (int b = 0; b < 4; ++b) std::cout << ',' << num(bare(b));
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SWAP laser-cooling simulator"};
  app.require_subcommand(1);

  Global g;
  g.outdir = std::getenv("SWAPCOOL_OUTDIR") ? std::getenv("SWAPCOOL_OUTDIR") : "results";
  if (const char* w = std::getenv("SWAPCOOL_WORKERS")) {
    try {
      g.workers = std::stoi(w);
    } catch (const std::exception&) {
      return fail("usage", std::string("SWAPCOOL_WORKERS is not an integer: ") + w, 2);
    }
  }
  std::uint64_t seed = 0;
  int n_traj = 0, workers = 0;
  auto* o_seed = app.add_option("--seed", seed, "Base RNG seed");
  auto* o_ntraj = app.add_option("--n-traj", n_traj, "Trajectories per ensemble")
                      ->check(CLI::PositiveNumber);
  auto* o_workers = app.add_option("--workers", workers, "Worker threads (0: all cores)")
                        ->check(CLI::NonNegativeNumber);
  app.add_option("--outdir", g.outdir, "Output directory (env SWAPCOOL_OUTDIR)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a preset or a config file");
  run->add_option("--preset", run_args.preset, "Preset name")
      ->check(CLI::IsMember(preset_names()));
  run->add_option("--config", run_args.config, "JSON run configuration");
  run->add_option("--set", run_args.set, "Override a config key (key=value, dotted for nested)");
  run->add_flag("--dump-config", run_args.dump, "Print the resolved configuration and exit");

  RunArgs scan_args;
  auto* scan = app.add_subcommand("scan", "Impulse/force scans over initial momentum");
  scan->add_option("--preset", scan_args.preset, "Scan preset (fig6, fig7, fig8, fig11)")
      ->check(CLI::IsMember({"fig6", "fig7", "fig8", "fig11"}));
  scan->add_option("--config", scan_args.config, "JSON run configuration");
  scan->add_option("--set", scan_args.set, "Override a config key");
  scan->add_option("--momenta", scan_args.momenta, "Initial momenta (hbar k)")->delimiter(',');
  scan->add_option("--levels", scan_args.levels, "Starting levels (g, e)")->delimiter(',');
  scan->add_flag("--dump-config", scan_args.dump, "Print the resolved configuration and exit");

  double a_omega0 = 0, a_alpha = 0, a_gamma = 0;
  int a_pmin = 0, a_pmax = 30;
  std::string a_level = "g";
  auto* analytic = app.add_subcommand("analytic", "Resonance-theory table (CSV on stdout)");
  analytic->add_option("--omega0", a_omega0, "Rabi frequency (omega_r)")->required();
  analytic->add_option("--alpha", a_alpha, "Sweep rate (omega_r^2)")->required();
  analytic->add_option("--gamma", a_gamma, "Linewidth (omega_r)");
  analytic->add_option("--p-min", a_pmin, "Smallest momentum (hbar k)");
  analytic->add_option("--p-max", a_pmax, "Largest momentum (hbar k)");
  analytic->add_option("--level", a_level, "Starting level (g, e)");

  double d_omega0 = 2.0, d_lo = -25.0, d_hi = 25.0;
  int d_p = 4, d_samples = 1001;
  bool d_diabatic = false;
  auto* dressed = app.add_subcommand("dressed", "Four-state dressed energies (CSV on stdout)");
  dressed->add_option("--omega0", d_omega0, "Rabi frequency (omega_r)");
  dressed->add_option("--p", d_p, "Momentum of |g,p> (hbar k)");
  dressed->add_option("--delta-min", d_lo, "Lowest detuning (omega_r)");
  dressed->add_option("--delta-max", d_hi, "Highest detuning (omega_r)");
  dressed->add_option("--samples", d_samples, "Number of detuning samples");
  dressed->add_flag("--diabatic", d_diabatic, "Follow branches by eigenvector overlap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  if (*o_seed) g.seed = seed;
  if (*o_ntraj) g.n_traj = n_traj;
  if (*o_workers) g.workers = workers;

  try {
    if (*run) return execute(build_config(run_args, g), g, run_args.dump);
    if (*scan) {
      if (scan_args.preset.empty() && scan_args.config.empty()) scan_args.preset = "fig7";
      RunConfig c = build_config(scan_args, g);
      if (c.task.rfind("scan", 0) != 0 && c.task != "stationary")
        throw std::invalid_argument("configuration task '" + c.task + "' is not a scan");
      return execute(c, g, scan_args.dump);
    }
    if (*analytic) {
      analytic_table(a_omega0, a_alpha, a_gamma, a_pmin, a_pmax, a_level);
      return 0;
    }
    if (*dressed) {
      dressed_table(d_omega0, d_p, d_lo, d_hi, d_samples, d_diabatic);
      return 0;
    }
  } catch (const GridEdgeError& e) {
    return fail("grid_edge", e.what());
  } catch (const ContractViolation& e) {
    return fail("contract_violation", e.what());
  } catch (const json::exception& e) {
    return fail("config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
