#include "swapcool/harness.hpp"

#include "swapcool/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace swapcool {

#ifndef SWAPCOOL_VERSION
#define SWAPCOOL_VERSION "0.0.0"
#endif

const char* code_version() { return SWAPCOOL_VERSION; }

using nlohmann::json;

namespace {

RampSign parse_sign(const std::string& s) {
  if (s == "positive" || s == "+") return RampSign::Positive;
  if (s == "negative" || s == "-") return RampSign::Negative;
  throw std::invalid_argument("ramp_sign must be 'positive' or 'negative', got '" + s + "'");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

SweepSchedule RunConfig::make_schedule() const {
  if (schedule == "sawtooth")
    return SweepSchedule(Sawtooth{delta_s_wr, t_s_wr, n_periods, parse_sign(ramp_sign)});
  if (schedule == "sweep_wait")
    return SweepSchedule(SweepWait{delta_s_wr, t_s_wr, n_periods, parse_sign(ramp_sign)});
  if (schedule == "constant") return SweepSchedule(ConstantDetuning{delta_wr, duration_wr});
  throw std::invalid_argument("unknown schedule '" + schedule + "'");
}

DriveParams RunConfig::make_drive() const { return DriveParams{omega0_wr, gamma_wr}; }

MomentumGrid RunConfig::make_grid() const {
  if (grid) return MomentumGrid(grid->n_min, grid->n_max, grid->edge_tolerance);
  const double reach = schedule == "constant" ? 4.0 * std::abs(initial_n) : delta_s_wr;
  return MomentumGrid::for_sweep(initial_n, reach);
}

IntegratorConfig RunConfig::make_integrator() const {
  IntegratorConfig c;
  c.dt_max = dt_max;
  c.safety = safety;
  c.records_per_period = records_per_period;
  c.workers = workers;
  return c;
}

SpinMomentumState RunConfig::make_initial() const {
  return make_basis_state(parse_level(initial_level), initial_n, make_grid());
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"preset", c.preset},
           {"task", c.task},
           {"schedule", c.schedule},
           {"delta_s_wr", c.delta_s_wr},
           {"t_s_wr", c.t_s_wr},
           {"n_periods", c.n_periods},
           {"ramp_sign", c.ramp_sign},
           {"delta_wr", c.delta_wr},
           {"duration_wr", c.duration_wr},
           {"omega0_wr", c.omega0_wr},
           {"gamma_wr", c.gamma_wr},
           {"initial", {{"level", c.initial_level}, {"n_hbar_k", c.initial_n}}},
           {"n_traj", c.n_traj},
           {"seed", c.seed},
           {"records_per_period", c.records_per_period},
           {"safety", c.safety},
           {"dt_max_wr", c.dt_max},
           {"workers", c.workers},
           {"equilibration",
            {{"window_cycles", c.equilibration.window},
             {"slope_threshold", c.equilibration.threshold}}},
           {"max_cycles", c.max_cycles},
           {"momenta_hbar_k", c.momenta},
           {"levels", c.levels},
           {"omega0_list_wr", c.omega0_list},
           {"dressed",
            {{"p_hbar_k", c.dressed_p},
             {"delta_min_wr", c.dressed_min_wr},
             {"delta_max_wr", c.dressed_max_wr},
             {"samples", c.dressed_samples}}},
           {"doppler",
            {{"omega_wr", c.doppler_omega_wr},
             {"delta_wr", c.doppler_delta_wr},
             {"t_end_wr", c.doppler_t_end_wr},
             {"n_max_hbar_k", c.doppler_n_max}}}};
  if (c.grid)
    j["grid"] = {{"n_min", c.grid->n_min},
                 {"n_max", c.grid->n_max},
                 {"edge_tolerance", c.grid->edge_tolerance}};
  else
    j["grid"] = nullptr;
}

void from_json(const json& j, RunConfig& c) {
  static const std::vector<std::string> known = {
      "preset",  "task",          "schedule",       "delta_s_wr", "t_s_wr",
      "n_periods", "ramp_sign",   "delta_wr",       "duration_wr", "omega0_wr",
      "gamma_wr", "initial",      "n_traj",         "seed",       "records_per_period",
      "safety",  "dt_max_wr",     "workers",        "equilibration", "max_cycles",
      "momenta_hbar_k", "levels", "omega0_list_wr", "dressed",    "doppler",
      "grid"};
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw std::invalid_argument("unknown config key '" + k + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("preset", c.preset);
  get("task", c.task);
  get("schedule", c.schedule);
  get("delta_s_wr", c.delta_s_wr);
  get("t_s_wr", c.t_s_wr);
  get("n_periods", c.n_periods);
  get("ramp_sign", c.ramp_sign);
  get("delta_wr", c.delta_wr);
  get("duration_wr", c.duration_wr);
  get("omega0_wr", c.omega0_wr);
  get("gamma_wr", c.gamma_wr);
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    if (i.contains("level")) i.at("level").get_to(c.initial_level);
    if (i.contains("n_hbar_k")) i.at("n_hbar_k").get_to(c.initial_n);
  }
  get("n_traj", c.n_traj);
  get("seed", c.seed);
  get("records_per_period", c.records_per_period);
  get("safety", c.safety);
  get("dt_max_wr", c.dt_max);
  get("workers", c.workers);
  if (j.contains("equilibration")) {
    const auto& e = j.at("equilibration");
    if (e.contains("window_cycles")) e.at("window_cycles").get_to(c.equilibration.window);
    if (e.contains("slope_threshold")) e.at("slope_threshold").get_to(c.equilibration.threshold);
  }
  get("max_cycles", c.max_cycles);
  get("momenta_hbar_k", c.momenta);
  get("levels", c.levels);
  get("omega0_list_wr", c.omega0_list);
  if (j.contains("dressed")) {
    const auto& d = j.at("dressed");
    if (d.contains("p_hbar_k")) d.at("p_hbar_k").get_to(c.dressed_p);
    if (d.contains("delta_min_wr")) d.at("delta_min_wr").get_to(c.dressed_min_wr);
    if (d.contains("delta_max_wr")) d.at("delta_max_wr").get_to(c.dressed_max_wr);
    if (d.contains("samples")) d.at("samples").get_to(c.dressed_samples);
  }
  if (j.contains("doppler")) {
    const auto& d = j.at("doppler");
    if (d.contains("omega_wr")) d.at("omega_wr").get_to(c.doppler_omega_wr);
    if (d.contains("delta_wr")) d.at("delta_wr").get_to(c.doppler_delta_wr);
    if (d.contains("t_end_wr")) d.at("t_end_wr").get_to(c.doppler_t_end_wr);
    if (d.contains("n_max_hbar_k")) d.at("n_max_hbar_k").get_to(c.doppler_n_max);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_null()) {
      c.grid.reset();
    } else {
      if (!g.is_object() || !g.contains("n_min") || !g.contains("n_max"))
        throw std::invalid_argument("grid must be null or give both n_min and n_max");
      GridOverride o;
      g.at("n_min").get_to(o.n_min);
      g.at("n_max").get_to(o.n_max);
      if (g.contains("edge_tolerance")) g.at("edge_tolerance").get_to(o.edge_tolerance);
      c.grid = o;
    }
  }
}

std::vector<std::string> preset_names() {
  return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig10", "fig11", "fig12"};
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "fig3") {
    // Excited fraction over one sweep from |g,10>.
    c.task = "timeseries";
    c.delta_s_wr = 200.0;
    c.t_s_wr = 22.0;
    c.omega0_wr = 5.0;
    c.initial_n = 10;
    c.records_per_period = 440;
  } else if (name == "fig4") {
    // Four-state dressed energies at p = 4, alpha = 1.
    c.task = "dressed";
    c.omega0_wr = 2.0;
    c.delta_s_wr = 50.0;
    c.t_s_wr = 50.0;
    c.dressed_p = 4;
    c.dressed_min_wr = -25.0;
    c.dressed_max_wr = 25.0;
    c.dressed_samples = 1001;
  } else if (name == "fig5") {
    // Coherent staircase: five slow sweeps from |g,10>.
    c.task = "timeseries";
    c.delta_s_wr = 120.0;
    c.t_s_wr = 1000.0;
    c.omega0_wr = 1.0;
    c.n_periods = 5;
    c.initial_n = 10;
    c.records_per_period = 200;
  } else if (name == "fig6") {
    // Coherent single-sweep impulse versus p_i for both starting levels;
    // the diabatic panel uses omega0_wr = 9.5.
    c.task = "scan_coherent";
    c.delta_s_wr = 360.0;
    c.t_s_wr = 2.0;
    c.omega0_wr = 26.8;
    c.levels = {"g", "e"};
    c.momenta = scan_momenta(110, 40);
  } else if (name == "fig7" || name == "fig8") {
    c.task = name == "fig7" ? "scan_steady" : "scan_pm";
    c.delta_s_wr = 1800.0;
    c.t_s_wr = 1.0;
    c.omega0_wr = 60.0;
    c.gamma_wr = 1.0;
    c.n_traj = 1000;
    c.momenta = name == "fig7" ? scan_momenta(450, 40) : scan_momenta(120, 40);
  } else if (name == "fig10") {
    c.task = "timeseries";
    c.schedule = "sweep_wait";
    c.delta_s_wr = 100.0;
    c.t_s_wr = 60.0;
    c.omega0_wr = 2.0;
    c.n_periods = 10;
    c.initial_n = 10;
    c.n_traj = 100;
    c.records_per_period = 2;
  } else if (name == "fig11") {
    c.task = "stationary";
    c.schedule = "sweep_wait";
    c.delta_s_wr = 100.0;
    c.t_s_wr = 60.0;
    c.initial_n = 10;
    c.n_traj = 500;
    c.omega0_list = {0.5, 0.8, 1.0, 1.3, 1.6, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0};
  } else if (name == "fig12") {
    c.task = "efficiency";
    c.delta_s_wr = 391.0;
    c.t_s_wr = 1.0;
    c.omega0_wr = 28.0;
    c.gamma_wr = 1.0;
    c.n_periods = 38;
    c.initial_n = 20;
    c.n_traj = 1000;
    c.doppler_omega_wr = 40.0;
    c.doppler_delta_wr = -40.0;
    c.doppler_t_end_wr = 200.0;
    c.doppler_n_max = 40;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

void apply_overrides(RunConfig& c, const std::vector<std::string>& overrides) {
  json j = c;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("override must be key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    json v;
    try {
      v = json::parse(val);
    } catch (const json::parse_error&) {
      v = val;
    }
    // Dotted keys address nested objects, e.g. initial.n_hbar_k=5.
    json* node = &j;
    std::string rest = key;
    for (auto dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
      node = &(*node)[rest.substr(0, dot)];
      rest = rest.substr(dot + 1);
    }
    (*node)[rest] = v;
  }
  c = j.get<RunConfig>();
}

EquilibrationVerdict equilibration(const std::vector<double>& y,
                                   const EquilibrationCriterion& crit) {
  if (crit.window < 2) throw std::invalid_argument("equilibration window must be >= 2 cycles");
  EquilibrationVerdict v;
  const int w = crit.window;
  for (int end = w; end <= static_cast<int>(y.size()); ++end) {
    // Least-squares slope over y[end-w .. end-1] against the cycle index.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < w; ++i) {
      const double x = i, yy = y[end - w + i];
      sx += x;
      sy += yy;
      sxx += x * x;
      sxy += x * yy;
    }
    const double slope = (w * sxy - sx * sy) / (w * sxx - sx * sx);
    v.slope = slope;
    if (std::abs(slope) < crit.threshold * std::abs(y[end - 1])) {
      v.equilibrated = true;
      v.cycle = end - 1;
      return v;
    }
  }
  return v;
}

StationaryResult stationary_energy(const RunConfig& config) {
  if (config.schedule != "sweep_wait")
    throw std::invalid_argument("stationary_energy requires a sweep-wait schedule");
  RunConfig one = config;
  one.n_periods = 1;
  SweepWaitEnsemble ens(one.make_initial(), one.make_schedule(), one.make_drive(), one.n_traj,
                        one.seed, one.make_integrator());
  StationaryResult out;
  std::vector<ObservableRecord> mean, se;
  std::vector<ObservableRecord> ses;
  ObservableRecord m, s;
  ens.current(m, s);
  out.history.push_back(m);
  ses.push_back(s);
  std::vector<double> p2{m.mean_p2};
  const double period = one.make_schedule().period();
  for (int cycle = 1; cycle <= config.max_cycles; ++cycle) {
    ens.advance_cycle(mean, se);
    ens.current(m, s);
    m.t = s.t = cycle * period;
    out.history.push_back(m);
    ses.push_back(s);
    p2.push_back(m.mean_p2);
    out.cycles = cycle;
    if (equilibration(p2, config.equilibration).equilibrated) {
      out.equilibrated = true;
      break;
    }
  }
  const int w = std::min<int>(config.equilibration.window, static_cast<int>(p2.size()));
  double e = 0.0, u = 0.0;
  for (int i = static_cast<int>(p2.size()) - w; i < static_cast<int>(p2.size()); ++i) {
    e += p2[i] / (2.0 * units::mass);
    u += ses[i].mean_p2 / (2.0 * units::mass);
  }
  // Window values share trajectories, so their SE does not shrink with w.
  out.energy = e / w;
  out.uncertainty = u / w;
  return out;
}

std::string timeseries_csv(const std::vector<ObservableRecord>& mean,
                           const std::vector<ObservableRecord>* se) {
  std::ostringstream os;
  os << "t,mean_p,mean_p2,p_rms,P_e,xi_cum,mean_abs_p,n_jump_minus,n_jump_zero,n_jump_plus";
  if (se)
    os << ",se_mean_p,se_mean_p2,se_p_rms,se_P_e,se_xi_cum,se_mean_abs_p,se_n_jump_minus,"
          "se_n_jump_zero,se_n_jump_plus";
  os << '\n';
  auto row = [&os](const ObservableRecord& r, bool with_t) {
    if (with_t) os << fmt(r.t);
    os << ',' << fmt(r.mean_p) << ',' << fmt(r.mean_p2) << ',' << fmt(r.p_rms) << ','
       << fmt(r.P_e) << ',' << fmt(r.xi_cum) << ',' << fmt(r.mean_abs_p) << ','
       << fmt(r.jumps[0]) << ',' << fmt(r.jumps[1]) << ',' << fmt(r.jumps[2]);
  };
  for (std::size_t i = 0; i < mean.size(); ++i) {
    row(mean[i], true);
    if (se) row((*se)[i], false);
    os << '\n';
  }
  return os.str();
}

std::string scan_csv(const std::vector<ImpulseScanPoint>& points, const std::string& level) {
  std::ostringstream os;
  os << "level,p_i,region,delta_p_rms,P_e_end,delta_p_avg,se_delta_p_avg,P_e_ss,xi\n";
  for (const auto& p : points)
    os << level << ',' << p.p_i << ',' << p.region << ',' << fmt(p.delta_p_rms) << ','
       << fmt(p.P_e_end) << ',' << fmt(p.delta_p_avg) << ',' << fmt(p.se_delta_p_avg) << ','
       << fmt(p.P_e_ss) << ',' << fmt(p.xi) << '\n';
  return os.str();
}

namespace {

json record_json(const ObservableRecord& r) {
  return json{{"t", r.t},           {"mean_p", r.mean_p},
              {"mean_p2", r.mean_p2}, {"p_rms", r.p_rms},
              {"P_e", r.P_e},       {"xi_cum", r.xi_cum},
              {"mean_abs_p", r.mean_abs_p}, {"jumps", r.jumps}};
}

class Writer {
 public:
  Writer(const std::string& outdir, const std::string& stem) : dir_(outdir), stem_(stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw std::runtime_error("cannot create output directory '" + outdir + "'");
  }

  void write(const std::string& suffix, const std::string& text) {
    const auto path = dir_ / (stem_ + suffix);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
    files_.push_back(path.string());
  }

  std::vector<std::string> files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::string stem_;
  std::vector<std::string> files_;
};

std::vector<ObservableRecord> period_ends(const std::vector<ObservableRecord>& recs, int rpp) {
  std::vector<ObservableRecord> out;
  for (std::size_t i = 0; i < recs.size(); i += static_cast<std::size_t>(rpp)) out.push_back(recs[i]);
  return out;
}

json verdict_json(const EquilibrationVerdict& v) {
  return json{{"equilibrated", v.equilibrated}, {"slope_per_cycle", v.slope}, {"cycle", v.cycle}};
}

std::string distribution_csv(const MomentumGrid& grid, const Eigen::VectorXd& dist) {
  std::ostringstream os;
  os << "p,probability\n";
  for (int j = 0; j < grid.size(); ++j) os << grid.n_min() + j << ',' << fmt(dist(j)) << '\n';
  return os.str();
}

// Sweep-wait ensembles at gamma = 0, with a P(p) snapshot halfway through the
// seventh ramp (or the last one for shorter runs) and at the end.
EnsembleResult run_sweep_wait_series(const RunConfig& c, Writer& w, json& s) {
  const SweepSchedule sched = c.make_schedule();
  const SpinMomentumState psi0 = c.make_initial();
  SweepWaitEnsemble ens(psi0, sched, c.make_drive(), c.n_traj, c.seed, c.make_integrator());
  EnsembleResult res;
  res.n_traj = c.n_traj;
  res.base_seed = c.seed;
  res.seeds = ens.seeds();
  ObservableRecord m, e;
  ens.current(m, e);
  res.mean.push_back(m);
  res.se.push_back(e);
  const int n = sched.n_periods();
  const int snap_cycle = std::min(7, n);
  std::vector<ObservableRecord> mc, sc;
  for (int k = 1; k <= n; ++k) {
    if (k == snap_cycle && n > 0) {
      const int half = std::max(1, ens.time_grid().steps_per_period /
                                       ens.time_grid().stride / 2);
      w.write("_snapshot.csv", distribution_csv(psi0.grid, ens.momentum_distribution(half)));
      s["snapshot"] = {{"cycle", k},
                       {"t", (k - 1) * sched.period() + ens.time_grid().record_time(half)}};
    }
    ens.advance_cycle(mc, sc);
    res.mean.insert(res.mean.end(), mc.begin(), mc.end());
    res.se.insert(res.se.end(), sc.begin(), sc.end());
  }
  w.write("_distribution.csv", distribution_csv(psi0.grid, ens.momentum_distribution()));
  return res;
}

void run_timeseries(const RunConfig& c, Writer& w, json& s) {
  const bool sw = c.schedule == "sweep_wait" && c.gamma_wr == 0.0;
  const auto r = sw ? run_sweep_wait_series(c, w, s) : run_ensemble(c.make_initial(), c.make_schedule(), c.make_drive(), c.n_traj,
                              c.seed, c.make_integrator());
  w.write("_timeseries.csv", timeseries_csv(r.mean, &r.se));
  std::vector<double> p2;
  const int rpp = c.schedule == "constant" ? 1 : c.records_per_period;
  for (const auto& e : period_ends(r.mean, rpp)) p2.push_back(e.mean_p2);
  s["final"] = record_json(r.mean.back());
  s["final_se"] = record_json(r.se.back());
  s["equilibration"] = verdict_json(equilibration(p2, c.equilibration));
  s["seeds"] = r.seeds;
}

void run_scan(const RunConfig& c, Writer& w, json& s) {
  const SweepSchedule sched = c.make_schedule();
  const DriveParams drive = c.make_drive();
  std::string csv;
  json points = json::array();
  for (const auto& lv : c.levels) {
    const auto pts = impulse_scan(c.momenta, parse_level(lv), sched, drive, c.n_traj, c.seed,
                                  c.make_integrator());
    const std::string part = scan_csv(pts, lv);
    csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
    for (const auto& p : pts)
      points.push_back({{"level", lv},
                        {"p_i", p.p_i},
                        {"delta_p_rms", p.delta_p_rms},
                        {"delta_p_avg", p.delta_p_avg},
                        {"xi", p.xi}});
  }
  w.write("_scan.csv", csv);
  s["n_points"] = points.size();
}

void run_scan_pm(const RunConfig& c, Writer& w, json& s) {
  const SweepSchedule sched = c.make_schedule();
  const DriveParams drive = c.make_drive();
  std::ostringstream os;
  os << "p_i,region,delta_p_plus,delta_p_minus,se,delta_p_avg_pos,delta_p_avg_neg,xi_pos,"
        "xi_neg\n";
  for (int p : c.momenta) {
    const auto r = delta_p_pm(p, sched, drive, c.n_traj, c.seed, c.make_integrator());
    os << p << ',' << region_classify(p, drive, sched) << ',' << fmt(r.delta_p_plus) << ','
       << fmt(r.delta_p_minus) << ',' << fmt(r.se) << ',' << fmt(r.positive.delta_p_avg) << ','
       << fmt(r.negative.delta_p_avg) << ',' << fmt(r.positive.xi) << ','
       << fmt(r.negative.xi) << '\n';
  }
  w.write("_scan.csv", os.str());
  s["n_points"] = c.momenta.size();
}

void run_stationary(const RunConfig& c, Writer& w, json& s) {
  std::ostringstream os;
  os << "omega0_wr,kappa,energy,se_energy,k_B_T,equilibrated,cycles\n";
  const double alpha = c.delta_s_wr / c.t_s_wr;
  json pts = json::array();
  for (double om : c.omega0_list) {
    RunConfig one = c;
    one.omega0_wr = om;
    const auto r = stationary_energy(one);
    const double kappa = om * om / alpha;
    const double kbt = 2.0 * r.energy;  // k_B T = <p^2>/m = 2 <p^2>/2m
    os << fmt(om) << ',' << fmt(kappa) << ',' << fmt(r.energy) << ',' << fmt(r.uncertainty)
       << ',' << fmt(kbt) << ',' << (r.equilibrated ? 1 : 0) << ',' << r.cycles << '\n';
    pts.push_back({{"omega0_wr", om},
                   {"energy", r.energy},
                   {"uncertainty", r.uncertainty},
                   {"equilibrated", r.equilibrated},
                   {"cycles", r.cycles}});
  }
  w.write("_scan.csv", os.str());
  s["points"] = pts;
}

void run_dressed(const RunConfig& c, Writer& w, json& s) {
  const int n = std::max(2, c.dressed_samples);
  Eigen::VectorXd deltas = Eigen::VectorXd::LinSpaced(n, c.dressed_min_wr, c.dressed_max_wr);
  const DriveParams drive = c.make_drive();
  const auto sorted = dressed_sweep(drive, c.dressed_p, deltas, false);
  std::ostringstream os;
  os << "delta,E0,E1,E2,E3,bare_g_p,bare_e_pm1,bare_g_pm2,bare_e_pm3\n";
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector4d bare = bare_four_state_energies(deltas(k), c.dressed_p);
    os << fmt(deltas(k));
    for (int b = 0; b < 4; ++b) os << ',' << fmt(sorted.eigenvalues(k, b));
    for (int b = 0; b < 4; ++b) os << ',' << fmt(bare(b));
    os << '\n';
  }
  w.write("_dressed.csv", os.str());
  // Doppleron splitting between the two middle branches.
  const auto gap = minimum_gap(drive, c.dressed_p, 1, c.dressed_min_wr, c.dressed_max_wr);
  s["doppleron_gap"] = {{"gap", gap.gap}, {"delta", gap.delta}};
}

void run_efficiency(const RunConfig& c, Writer& w, json& s) {
  const auto swap = run_ensemble(c.make_initial(), c.make_schedule(), c.make_drive(), c.n_traj,
                                 c.seed, c.make_integrator());
  w.write("_swap.csv", timeseries_csv(swap.mean, &swap.se));
  const int nd = c.doppler_n_max > 0 ? c.doppler_n_max : 2 * std::abs(c.initial_n) + 10;
  const MomentumGrid dg = MomentumGrid::symmetric(nd);
  IntegratorConfig dcfg = c.make_integrator();
  dcfg.records_per_period = 1;
  const auto dop = doppler_cool(make_basis_state(parse_level(c.initial_level), c.initial_n, dg),
                                DopplerParams{c.doppler_omega_wr, c.doppler_delta_wr},
                                c.gamma_wr, c.doppler_t_end_wr, c.n_traj,
                                derive_seed(c.seed, 0xD0), dcfg);
  w.write("_doppler.csv", timeseries_csv(dop.mean, &dop.se));

  const auto eff = removal_efficiency(swap);
  std::ostringstream os;
  os << "xi,swap_energy,doppler_energy,swap_efficiency\n";
  double peak = 0.0;
  for (std::size_t i = 0; i < swap.mean.size(); ++i) {
    const double xi = swap.mean[i].xi_cum;
    peak = std::max(peak, eff[i]);
    double de = std::nan("");
    try {
      de = energy_at_xi(dop, xi);
    } catch (const std::out_of_range&) {
    }
    os << fmt(xi) << ',' << fmt(swap.mean[i].mean_p2 / (2.0 * units::mass)) << ',' << fmt(de)
       << ',' << fmt(eff[i]) << '\n';
  }
  w.write("_efficiency.csv", os.str());
  s["final"] = record_json(swap.mean.back());
  s["doppler_final"] = record_json(dop.mean.back());
  s["peak_efficiency_hbar_k_per_photon"] = peak;
  s["seeds"] = swap.seeds;
  s["doppler_seeds"] = dop.seeds;
}

}  // namespace

RunOutput run_config(const RunConfig& config, const std::string& outdir) {
  Writer w(outdir, config.preset);
  json s;
  s["schema_version"] = kSchemaVersion;
  s["code_version"] = code_version();
  s["config"] = config;
  const std::string& t = config.task;
  if (t == "timeseries")
    run_timeseries(config, w, s);
  else if (t == "scan_coherent" || t == "scan_steady")
    run_scan(config, w, s);
  else if (t == "scan_pm")
    run_scan_pm(config, w, s);
  else if (t == "stationary")
    run_stationary(config, w, s);
  else if (t == "dressed")
    run_dressed(config, w, s);
  else if (t == "efficiency")
    run_efficiency(config, w, s);
  else
    throw std::invalid_argument("unknown task '" + t + "'");
  w.write("_summary.json", s.dump(2) + "\n");
  return {w.files(), s};
}

}  // namespace swapcool
