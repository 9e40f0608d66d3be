#include <cmath>
#include <fstream>

#include "suites.hpp"

namespace varflow::cli {

namespace {

constexpr const char* kSuite = "simulate";

void write_file(const std::filesystem::path& path, const auto& writer) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  writer(os);
}

}  // namespace

std::vector<Record> run_simulate(const SuiteContext& ctx) {
  using namespace bubble;
  const YAML::Node sec = ctx.config["simulate"];
  const double s = ctx.tol_scale;
  const SolverConfig cfg = solver_config_from_yaml(sec);
  const InitialData init = initial_data_from_yaml(sec);
  const YAML::Node tol = sec ? sec["tolerances"] : YAML::Node();

  const RadialTwoPhaseState s0 = initial_state(cfg, init);
  const Trajectory tr = simulate(cfg, s0);
  const ConservationReport rep = conservation_report(tr.records);

  write_file(ctx.out_dir / "timeseries.csv",
             [&](std::ostream& os) { write_timeseries_csv(os, tr.records); });
  write_file(ctx.out_dir / "profile_A.csv",
             [&](std::ostream& os) { write_profile_csv(os, profile_A(tr.final_state, cfg)); });
  write_file(ctx.out_dir / "profile_B.csv",
             [&](std::ostream& os) { write_profile_csv(os, profile_B(tr.final_state, cfg)); });

  std::vector<Record> out;
  const std::string run = system_name(cfg.system) + ", t_end = " + format_number(cfg.t_end);
  const double mass_tol = get_or(tol, "mass", 1e-8);
  auto drift = [&](const char* anchor, const std::string& what, double d, double t) {
    out.push_back(make_check(kSuite, anchor, what + ", " + run, d, 0.0, d, t, s));
  };
  drift("mass_conservation", "total mass", rep.mass_drift, mass_tol);
  drift("mass_conservation", "phase A mass", rep.mass_A_drift, mass_tol);
  drift("mass_conservation", "phase B mass", rep.mass_B_drift, mass_tol);
  drift("surface_mass_conservation", "4 pi R^2 rho_S", rep.surface_mass_drift,
        get_or(tol, "surface_mass", 1e-12));
  {
    Record r = make_check(kSuite, "momentum_balance", "total momentum magnitude, " + run,
                          rep.max_momentum, 0.0, rep.max_momentum, get_or(tol, "momentum", 1e-12), s);
    r.notes = {{"note", rep.momentum_note}};
    out.push_back(r);
  }
  {
    Record r = make_check(kSuite, "energy_balance", "total energy drift, " + run, rep.energy_drift,
                          0.0, rep.energy_drift, get_or(tol, "energy", 1e-3), s);
    r.extra = {{"energy_initial", tr.records.front().energy_total},
               {"energy_final", tr.records.back().energy_total},
               {"steps", static_cast<double>(tr.steps)},
               {"surface_pressure_sign_changes",
                static_cast<double>(tr.surface_pressure_sign_changes.size())}};
    out.push_back(r);
  }
  if (init.equilibrium && init.amplitude == 0.0) {
    double dev = 0.0;
    for (const ConservationRecord& c : tr.records) dev = std::max(dev, std::abs(c.R - s0.R));
    drift("stationary_equilibrium", "max |R(t) - R0|", dev, get_or(tol, "stationary", 1e-12));
  }
  if (cfg.system == System::ConstantTension) {
    const double pa = profile_A(s0, cfg).pressure.back();
    const double pb = profile_B(s0, cfg).pressure.front();
    const double H = -2.0 / s0.R;
    const double jump = cfg.tension->p0 * H + pb - pa;
    out.push_back(make_check(kSuite, "tension_pressure_jump", "p0 H + P_B - P_A at t = 0",
                             jump, 0.0, std::abs(jump), 1e-13 * std::max(1.0, std::abs(pa)), s));
  }
  return out;
}

}  // namespace varflow::cli
