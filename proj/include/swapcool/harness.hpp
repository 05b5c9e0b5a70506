#pragma once

// Experiment presets, run configuration, equilibration detection and result
// files (CSV time series / scans, JSON summary).

#include "swapcool/analysis.hpp"
#include "swapcool/baselines.hpp"
#include "swapcool/sweep_wait.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace swapcool {

inline constexpr int kSchemaVersion = 1;
const char* code_version();

struct GridOverride {
  int n_min = 0;
  int n_max = 0;
  double edge_tolerance = tolerance::edge;
};

struct EquilibrationCriterion {
  int window = 5;            ///< cycles
  double threshold = 0.02;   ///< |slope| per cycle relative to the current <p^2>
};

/// Everything needed to reproduce a run. All frequencies are in omega_r,
/// times in 1/omega_r, momenta in hbar k.
struct RunConfig {
  std::string preset = "custom";
  /// "timeseries", "scan_coherent", "scan_steady", "scan_pm", "stationary",
  /// "dressed", "efficiency"
  std::string task = "timeseries";
  std::string schedule = "sawtooth";  ///< sawtooth | sweep_wait | constant
  double delta_s_wr = 0.0;
  double t_s_wr = 1.0;
  int n_periods = 1;
  std::string ramp_sign = "positive";
  double delta_wr = 0.0;     ///< constant detuning
  double duration_wr = 0.0;  ///< constant detuning
  double omega0_wr = 0.0;
  double gamma_wr = 0.0;
  std::string initial_level = "g";
  int initial_n = 0;
  int n_traj = 1;
  std::uint64_t seed = 1;
  std::optional<GridOverride> grid;
  int records_per_period = 1;
  double safety = 0.1;
  double dt_max = 0.0;
  int workers = 1;
  EquilibrationCriterion equilibration;
  int max_cycles = 60;
  /// Scan momenta (scan tasks) and scan level.
  std::vector<int> momenta;
  std::vector<std::string> levels{"g"};
  /// Rabi frequencies for the stationary-energy task.
  std::vector<double> omega0_list;
  /// Dressed-state task: center momentum and detuning window.
  int dressed_p = 0;
  double dressed_min_wr = 0.0;
  double dressed_max_wr = 0.0;
  int dressed_samples = 0;
  /// Doppler baseline for the efficiency task.
  double doppler_omega_wr = 0.0;
  double doppler_delta_wr = 0.0;
  double doppler_t_end_wr = 0.0;
  int doppler_n_max = 0;  ///< Doppler grid half-width (0: 2|n0| + 10)

  SweepSchedule make_schedule() const;
  DriveParams make_drive() const;
  MomentumGrid make_grid() const;
  IntegratorConfig make_integrator() const;
  SpinMomentumState make_initial() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Names of the built-in presets.
std::vector<std::string> preset_names();
/// Preset configuration (std::invalid_argument for unknown names).
RunConfig preset(const std::string& name);

/// Applies "key=value" overrides using the JSON key names.
void apply_overrides(RunConfig& c, const std::vector<std::string>& overrides);

struct EquilibrationVerdict {
  bool equilibrated = false;
  double slope = 0.0;   ///< least-squares slope of <p^2> per cycle over the window
  int cycle = -1;       ///< cycle at which the criterion first held
};
/// Evaluates the windowed-slope criterion on end-of-cycle <p^2> values
/// (index 0: initial state).
EquilibrationVerdict equilibration(const std::vector<double>& mean_p2_per_cycle,
                                   const EquilibrationCriterion& crit);

struct StationaryResult {
  double energy = 0.0;       ///< <p^2>/2m averaged over the final window
  double uncertainty = 0.0;
  bool equilibrated = false;
  int cycles = 0;
  std::vector<ObservableRecord> history;  ///< end-of-cycle ensemble means
};
/// Sweep-wait run advanced until the equilibration criterion holds (or
/// max_cycles is reached, reported with equilibrated = false).
StationaryResult stationary_energy(const RunConfig& config);

/// CSV writers with fixed column order.
std::string timeseries_csv(const std::vector<ObservableRecord>& mean,
                           const std::vector<ObservableRecord>* se);
std::string scan_csv(const std::vector<ImpulseScanPoint>& points, const std::string& level);

struct RunOutput {
  std::vector<std::string> files;
  nlohmann::json summary;
};

/// Runs a configuration and writes <preset>_*.csv and <preset>_summary.json
/// into outdir.
RunOutput run_config(const RunConfig& config, const std::string& outdir);

}  // namespace swapcool
