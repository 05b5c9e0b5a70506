#include "swapcool/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace swapcool;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("swapcool_test_" + name);
  fs::remove_all(d);
  return d;
}

// Small, fast sweep-wait run with enough structure to exercise the writers.
RunConfig small_sweep_wait() {
  RunConfig c = preset("fig10");
  c.preset = "small";
  c.delta_s_wr = 40;
  c.t_s_wr = 10;
  c.initial_n = 4;
  c.n_periods = 3;
  c.n_traj = 8;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("preset values") {
  const auto f5 = preset("fig5");
  CHECK(f5.delta_s_wr == 120);
  CHECK(f5.t_s_wr == 1000);
  CHECK(f5.omega0_wr == 1);
  CHECK(f5.n_periods == 5);
  CHECK(f5.initial_n == 10);
  CHECK(f5.gamma_wr == 0);
  const auto f6 = preset("fig6");
  CHECK(f6.make_drive().kappa(f6.make_schedule().alpha()) == doctest::Approx(4.0).epsilon(0.01));
  const auto f7 = preset("fig7");
  CHECK(f7.delta_s_wr == 1800);
  CHECK(f7.omega0_wr == 60);
  CHECK(f7.gamma_wr == 1);
  CHECK(f7.n_traj == 1000);
  const auto f10 = preset("fig10");
  CHECK(f10.schedule == "sweep_wait");
  CHECK(f10.n_traj == 100);
  CHECK(f10.omega0_wr == 2);
  const auto f11 = preset("fig11");
  CHECK(f11.n_traj == 500);
  CHECK(f11.omega0_list.size() >= 8);
  const auto f12 = preset("fig12");
  CHECK(f12.omega0_wr == 28);
  CHECK(f12.delta_s_wr == 391);
  CHECK(f12.n_periods == 38);
  CHECK(f12.initial_n == 20);
  CHECK(f12.doppler_omega_wr == 40);
  CHECK(f12.doppler_delta_wr == -40);
  for (const auto& n : preset_names()) CHECK(preset(n).preset == n);
  CHECK_THROWS_AS(preset("fig99"), std::invalid_argument);
}

TEST_CASE("configuration round-trips through JSON") {
  for (const auto& n : preset_names()) {
    const auto c = preset(n);
    const nlohmann::json j = c;
    const RunConfig back = j.get<RunConfig>();
    CHECK(nlohmann::json(back) == j);
  }
  RunConfig g = preset("fig5");
  g.grid = GridOverride{-5, 7, 1e-3};
  const nlohmann::json j = g;
  const auto back = j.get<RunConfig>();
  REQUIRE(back.grid.has_value());
  CHECK(back.grid->n_max == 7);
  CHECK(back.make_grid().n_min() == -5);

  nlohmann::json bad = j;
  bad["omega_0"] = 3;
  CHECK_THROWS_AS(bad.get<RunConfig>(), std::invalid_argument);
}

TEST_CASE("overrides use the JSON key names") {
  RunConfig c = preset("fig10");
  apply_overrides(c, {"omega0_wr=3.5", "equilibration.window_cycles=7", "n_traj=12",
                      "initial.level=e"});
  CHECK(c.omega0_wr == 3.5);
  CHECK(c.equilibration.window == 7);
  CHECK(c.n_traj == 12);
  CHECK(c.initial_level == "e");
  CHECK_THROWS_AS(apply_overrides(c, {"nonsense=1"}), std::invalid_argument);
  CHECK_THROWS_AS(apply_overrides(c, {"no_equals_sign"}), std::invalid_argument);
}

TEST_CASE("equilibration criterion") {
  const EquilibrationCriterion crit{5, 0.02};
  // Decaying then flat: first holds once the window covers only flat values.
  const std::vector<double> y{100, 60, 30, 10, 2, 1.5, 1.5, 1.5, 1.5, 1.5};
  const auto v = equilibration(y, crit);
  CHECK(v.equilibrated);
  CHECK(v.cycle == 9);
  CHECK(v.slope == doctest::Approx(0.0).epsilon(1e-12));
  // Still falling by 5% per cycle.
  std::vector<double> fall{1.0};
  for (int i = 0; i < 20; ++i) fall.push_back(fall.back() * 0.95);
  CHECK_FALSE(equilibration(fall, crit).equilibrated);
  CHECK(equilibration(fall, EquilibrationCriterion{5, 0.1}).equilibrated);
  // Too short for a window.
  CHECK_FALSE(equilibration({1, 1, 1}, crit).equilibrated);
  CHECK_THROWS_AS(equilibration(y, EquilibrationCriterion{1, 0.02}), std::invalid_argument);
}

TEST_CASE("stationary energy contracts") {
  RunConfig c = preset("fig5");
  CHECK_THROWS_AS(stationary_energy(c), std::invalid_argument);
  RunConfig s = small_sweep_wait();
  s.max_cycles = 1;
  const auto r = stationary_energy(s);
  CHECK_FALSE(r.equilibrated);
  CHECK(r.cycles == 1);
}

TEST_CASE("CSV headers") {
  const std::vector<ObservableRecord> rec(2);
  const auto ts = timeseries_csv(rec, nullptr);
  CHECK(ts.rfind("t,mean_p,mean_p2,p_rms,P_e,xi_cum,mean_abs_p,", 0) == 0);
  CHECK(std::count(ts.begin(), ts.end(), '\n') == 3);
  const auto sc = scan_csv({ImpulseScanPoint{}}, "g");
  CHECK(sc.rfind("level,p_i,region,", 0) == 0);
}

TEST_CASE("reruns are byte-identical and the summary echo reproduces the run") {
  const auto d1 = scratch_dir("a"), d2 = scratch_dir("b"), d3 = scratch_dir("c");
  const RunConfig c = small_sweep_wait();
  const auto a = run_config(c, d1.string());
  const auto b = run_config(c, d2.string());
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i)
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  CHECK(a.summary["schema_version"] == kSchemaVersion);
  CHECK(a.summary["code_version"] == std::string(code_version()));

  const auto summary = nlohmann::json::parse(slurp(d1 / "small_summary.json"));
  const RunConfig echo = summary["config"].get<RunConfig>();
  const auto e = run_config(echo, d3.string());
  CHECK(slurp(d1 / "small_timeseries.csv") == slurp(d3 / "small_timeseries.csv"));
  for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
}

TEST_CASE("worker count does not change the output") {
  const auto d1 = scratch_dir("w1"), d2 = scratch_dir("w3");
  RunConfig c = small_sweep_wait();
  c.schedule = "sawtooth";
  c.gamma_wr = 1.0;
  c.n_periods = 2;
  run_config(c, d1.string());
  c.workers = 3;
  run_config(c, d2.string());
  CHECK(slurp(d1 / "small_timeseries.csv") == slurp(d2 / "small_timeseries.csv"));
  for (const auto& d : {d1, d2}) fs::remove_all(d);
}

TEST_CASE("unwritable output directory") {
  const auto d = scratch_dir("file");
  { std::ofstream(d.string()) << "x"; }
  CHECK_THROWS_AS(run_config(small_sweep_wait(), (d / "sub").string()), std::runtime_error);
  fs::remove(d);
}

}  // TEST_SUITE
