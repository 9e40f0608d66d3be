#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "varflow/bubble.hpp"

using namespace varflow;
using namespace varflow::bubble;
using constitutive::BarotropicLaw;
using constitutive::Phase;
using constitutive::total_pressure;

namespace {

SolverConfig compressible(int n = 32) {
  SolverConfig c;
  c.law_S = BarotropicLaw::gamma_law(0.3, 2.0, Phase::S);
  c.nr_A = n;
  c.nr_B = n;
  return c;
}

SolverConfig tension(double p0, int n = 32) {
  SolverConfig c;
  c.system = System::ConstantTension;
  c.law_A = BarotropicLaw::gamma_law(1.0, 1.4, Phase::A);
  c.law_B = BarotropicLaw::quadratic(1.5, Phase::B);
  c.tension = constitutive::ConstantTension{p0};
  c.nr_A = n;
  c.nr_B = n;
  return c;
}

InitialData perturbed(double amplitude) {
  InitialData d;
  d.amplitude = amplitude;
  return d;
}

double total_mass(const RadialTwoPhaseState& s) {
  double m = s.surface_mass;
  for (double x : s.mass_A) m += x;
  for (double x : s.mass_B) m += x;
  return m;
}

RadialTwoPhaseState run_steps(const RadialTwoPhaseState& s0, const SolverConfig& c, int n, double dt) {
  RadialTwoPhaseState s = s0;
  for (int k = 0; k < n; ++k) s = step(s, c, dt);
  return s;
}

}  // namespace

TEST(Config, ValidationRejectsInconsistentSettings) {
  SolverConfig c = compressible();
  EXPECT_NO_THROW(c.validate());
  SolverConfig bad = c;
  bad.R_out = 0.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.nr_A = 8;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.cfl = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.law_S.reset();
  EXPECT_THROW(bad.validate(), ConfigError);
  SolverConfig t = tension(0.5);
  EXPECT_NO_THROW(t.validate());
  t.tension.reset();
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Config, SystemNames) {
  EXPECT_EQ(system_from_name(system_name(System::CompressibleSurface)), System::CompressibleSurface);
  EXPECT_EQ(system_from_name(system_name(System::ConstantTension)), System::ConstantTension);
  EXPECT_THROW(system_from_name("1.3"), ConfigError);
}

TEST(Grid, EdgesCoverBothPhases) {
  const SolverConfig c = compressible();
  const auto a = edges_A(c, 0.8);
  const auto b = edges_B(c, 0.8);
  EXPECT_EQ(a.size(), 33u);
  EXPECT_EQ(a.front(), 0.0);
  EXPECT_EQ(a.back(), 0.8);
  EXPECT_EQ(b.front(), 0.8);
  EXPECT_EQ(b.back(), 2.0);
}

TEST(InitialState, SurfaceDensityUnderPrescribedRadius) {
  // Constant surface mass on a sphere of radius 1 + t.
  RadialTwoPhaseState s = initial_state(compressible(), InitialData{});
  const double rho0 = s.rho_S();
  for (double t : {0.0, 0.5, 1.0, 2.5}) {
    s.R = 1.0 + t;
    EXPECT_NEAR(s.rho_S(), rho0 / ((1.0 + t) * (1.0 + t)), 1e-15);
  }
}

TEST(InitialState, BalancedDensityObeysLaplaceLaw) {
  const SolverConfig c = compressible();
  const InitialData d;
  const double rho_A = balanced_inner_density(c, d.rho_B0, d.rho_S0);
  const double pS = total_pressure(*c.law_S, d.rho_S0);
  EXPECT_NEAR(total_pressure(c.law_A, rho_A),
              total_pressure(c.law_B, d.rho_B0) - 2.0 * pS / c.R0, 1e-13);
}

TEST(InitialState, PerturbationMassMatchesIntegral) {
  // rho_A0 (1 + a exp(-r^2/w^2)) over the ball, integrated in closed form.
  SolverConfig c = compressible();
  InitialData d = perturbed(0.2);
  d.equilibrium = false;
  d.rho_A0 = 1.3;
  const RadialTwoPhaseState s = initial_state(c, d);
  double m = 0.0;
  for (double x : s.mass_A) m += x;
  const double w = d.width;
  const double R = c.R0;
  const double gauss = 4.0 * kPi * (std::sqrt(kPi) * w * w * w / 4.0 * std::erf(R / w) -
                                    w * w * R / 2.0 * std::exp(-R * R / (w * w)));
  EXPECT_NEAR(m, d.rho_A0 * (4.0 * kPi / 3.0 + d.amplitude * gauss), 1e-10);
}

TEST(Equilibrium, RightHandSideVanishes) {
  const SolverConfig c = compressible();
  EXPECT_LT(radial_rhs(initial_state(c, InitialData{}), c).max_abs(), 1e-12);
  InitialData td;
  td.rho_B0 = 1.0;
  const SolverConfig t = tension(0.5);
  EXPECT_LT(radial_rhs(initial_state(t, td), t).max_abs(), 1e-12);
}

TEST(Equilibrium, StaysStationaryForManySteps) {
  const SolverConfig c = compressible();
  const RadialTwoPhaseState s0 = initial_state(c, InitialData{});
  const double dt = 0.9 * stable_dt(s0, c);
  const RadialTwoPhaseState s = run_steps(s0, c, 10000, dt);
  EXPECT_LT(std::abs(s.R - s0.R), 1e-12 * 1e4);
  EXPECT_LT(std::abs(s.Rdot), 1e-12 * 1e4);
  for (std::size_t i = 0; i < s.mass_A.size(); ++i) {
    EXPECT_NEAR(s.mass_A[i], s0.mass_A[i], 1e-12 * s0.mass_A[i]);
  }
}

TEST(Step, ZeroStepIsIdentity) {
  const SolverConfig c = compressible();
  const RadialTwoPhaseState s0 = initial_state(c, perturbed(0.05));
  const RadialTwoPhaseState s = step(s0, c, 0.0);
  EXPECT_EQ(s.R, s0.R);
  EXPECT_EQ(s.t, s0.t);
  EXPECT_EQ(s.mass_A, s0.mass_A);
  EXPECT_EQ(s.momentum_B, s0.momentum_B);
}

TEST(Step, CflViolationThrows) {
  const SolverConfig c = compressible();
  const RadialTwoPhaseState s0 = initial_state(c, perturbed(0.05));
  EXPECT_THROW(step(s0, c, 2.0 * stable_dt(s0, c)), CflViolationError);
  EXPECT_NO_THROW(step(s0, c, stable_dt(s0, c)));
}

TEST(Step, VacuumAndEscapedInterfaceAreDomainErrors) {
  const SolverConfig c = compressible();
  RadialTwoPhaseState s = initial_state(c, InitialData{});
  RadialTwoPhaseState v = s;
  v.mass_B[3] = 0.0;
  EXPECT_THROW(radial_rhs(v, c), DomainError);
  RadialTwoPhaseState out = s;
  out.R = 2.5;
  EXPECT_THROW(radial_rhs(out, c), DomainError);
}

TEST(PerturbedRun, StaysBoundedAndConservesMass) {
  const SolverConfig c = compressible();
  const RadialTwoPhaseState s0 = initial_state(c, perturbed(0.05));
  RadialTwoPhaseState s = s0;
  const double m0 = total_mass(s0);
  for (int k = 0; k < 1000; ++k) {
    s = step(s, c, 0.9 * stable_dt(s, c));
    ASSERT_GT(s.R, 0.9);
    ASSERT_LT(s.R, 1.1);
  }
  EXPECT_NEAR(total_mass(s), m0, 1e-12 * m0);
  EXPECT_EQ(s.surface_mass, s0.surface_mass);
  EXPECT_LT(measure(s, c).momentum, 1e-12);
}

TEST(ConstantTension, StaticJumpForUnitRadius) {
  // R = 1, p0 = 0.5: P_A - P_B = -2 p0 / R = -1.
  InitialData d;
  d.rho_B0 = 1.0;
  const SolverConfig c = tension(0.5);
  const RadialTwoPhaseState s0 = initial_state(c, d);
  const CellProfile a = profile_A(s0, c);
  const CellProfile b = profile_B(s0, c);
  const double H = -2.0 / s0.R;
  EXPECT_NEAR(0.5 * H + b.pressure.front() - a.pressure.back(), 0.0, 1e-15);
  EXPECT_NEAR(a.pressure.back() - b.pressure.front(), -1.0, 1e-15);

  const RadialTwoPhaseState s = run_steps(s0, c, 1000, 0.9 * stable_dt(s0, c));
  EXPECT_NEAR(s.R, s0.R, 1e-14);
  EXPECT_LT(std::abs(s.Rdot), 1e-14);
  const CellProfile a1 = profile_A(s, c);
  const CellProfile b1 = profile_B(s, c);
  EXPECT_NEAR(0.5 * H + b1.pressure.front() - a1.pressure.back(), 0.0, 1e-14);
}

TEST(ConstantTension, PerturbedRunConservesMass) {
  InitialData d = perturbed(0.05);
  d.rho_B0 = 1.0;
  const SolverConfig c = tension(0.5);
  const RadialTwoPhaseState s0 = initial_state(c, d);
  EXPECT_EQ(s0.surface_mass, 0.0);
  RadialTwoPhaseState s = s0;
  for (int k = 0; k < 300; ++k) s = step(s, c, 0.9 * stable_dt(s, c));
  EXPECT_NEAR(total_mass(s), total_mass(s0), 1e-12 * total_mass(s0));
  EXPECT_NE(s.R, s0.R);
}

TEST(Energy, DriftConvergesAtSecondOrderUnderJointRefinement) {
  // Fixed CFL: dt and dr shrink together.
  std::vector<double> drift;
  for (int n : {32, 64, 128}) {
    SolverConfig c = compressible(n);
    c.t_end = 0.5;
    c.output_dt = 0.5;
    const Trajectory tr = simulate(c, initial_state(c, perturbed(0.02)));
    drift.push_back(conservation_report(tr.records).energy_drift);
  }
  const double order1 = std::log2(drift[0] / drift[1]);
  const double order2 = std::log2(drift[1] / drift[2]);
  EXPECT_GT(order1, 1.7) << drift[0] << " " << drift[1];
  EXPECT_GT(order2, 1.7) << drift[1] << " " << drift[2];
}

TEST(TimeIntegration, FixedGridDriftApproachesSemiDiscreteValue) {
  // Halving dt on a fixed grid: the energy drift settles on the dissipation
  // of the spatial scheme instead of vanishing. The limiter makes the
  // right-hand side only Lipschitz, so the differences shrink at about
  // second order rather than at the order of the Runge-Kutta stages.
  const SolverConfig c = compressible(32);
  const RadialTwoPhaseState s0 = initial_state(c, perturbed(0.02));
  const double E0 = measure(s0, c).energy_total;
  const double T = 1.0;
  const int n0 = static_cast<int>(std::ceil(T / (0.5 * stable_dt(s0, c))));
  std::vector<double> drift;
  for (int k : {1, 2, 4}) drift.push_back(measure(run_steps(s0, c, n0 * k, T / (n0 * k)), c).energy_total - E0);
  EXPECT_LT(drift[2], 0.0);
  EXPECT_LT(std::abs(drift[0] - drift[2]), 1e-3 * std::abs(drift[2]));
  EXPECT_GT(std::log2(std::abs(drift[0] - drift[1]) / std::abs(drift[1] - drift[2])), 1.5);
}

TEST(Simulate, LandsOnOutputTimes) {
  SolverConfig c = compressible();
  c.t_end = 0.3;
  c.output_dt = 0.1;
  const Trajectory tr = simulate(c, initial_state(c, perturbed(0.05)));
  ASSERT_EQ(tr.records.size(), 4u);
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    EXPECT_NEAR(tr.records[i].t, 0.1 * static_cast<double>(i), 1e-14);
  }
  EXPECT_GT(tr.steps, 0);
  EXPECT_DOUBLE_EQ(tr.final_state.t, tr.records.back().t);
}

TEST(Measure, EquilibriumEnergyParts) {
  // At rest the energy is sum p(rho) volume plus p_S(rho_S) area.
  const SolverConfig c = compressible();
  const InitialData d;
  const RadialTwoPhaseState s = initial_state(c, d);
  const ConservationRecord r = measure(s, c);
  const double rho_A = balanced_inner_density(c, d.rho_B0, d.rho_S0);
  const double internal = c.law_A.p(rho_A) * 4.0 * kPi / 3.0 +
                          c.law_B.p(d.rho_B0) * 4.0 * kPi / 3.0 * 7.0 +
                          c.law_S->p(d.rho_S0) * 4.0 * kPi;
  EXPECT_EQ(r.energy_kinetic, 0.0);
  EXPECT_NEAR(r.energy_internal, internal, 1e-12 * internal);
  EXPECT_NEAR(r.mass_total, rho_A * 4.0 * kPi / 3.0 + d.rho_B0 * 28.0 * kPi / 3.0 + 4.0 * kPi * d.rho_S0,
              1e-12 * r.mass_total);
}

TEST(Report, DriftsAndNote) {
  std::vector<ConservationRecord> rs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    rs[i].mass_total = 2.0 + 0.01 * static_cast<double>(i);
    rs[i].mass_A = 1.0;
    rs[i].mass_B = 1.0;
    rs[i].energy_total = -4.0 + 0.1 * static_cast<double>(i);
    rs[i].momentum = 1e-3 * static_cast<double>(i);
  }
  const ConservationReport r = conservation_report(rs);
  EXPECT_NEAR(r.mass_drift, 0.01, 1e-15);
  EXPECT_NEAR(r.energy_drift, 0.05, 1e-15);
  EXPECT_NEAR(r.max_momentum, 2e-3, 1e-18);
  EXPECT_FALSE(r.momentum_note.empty());
}

TEST(Output, CsvHeaders) {
  std::ostringstream ts;
  write_timeseries_csv(ts, {ConservationRecord{}});
  EXPECT_EQ(ts.str().rfind("t,R,Rdot,rho_S,mass_total,mass_A,mass_B,energy_kinetic,energy_internal,energy_total\n", 0),
            0u);
  std::ostringstream ps;
  write_profile_csv(ps, CellProfile{{0.5}, {1.0}, {0.0}, {0.4}});
  EXPECT_EQ(ps.str(), "r,rho,u,pressure\n0.5,1,0,0.40000000000000002\n");
}

TEST(FrozenSurface, RestingInterfaceAndRotation) {
  const SolverConfig c = compressible();
  const RadialTwoPhaseState s = initial_state(c, InitialData{});
  const ScalarField rho_S = ScalarField::constant(0.3);
  const FrozenSurfaceReport rest =
      frozen_incompressible_residual(s, c, VectorField::constant(Vec3::Zero()), rho_S, true, 6);
  const CellProfile a = profile_A(s, c);
  const CellProfile b = profile_B(s, c);
  EXPECT_NEAR(rest.mean_pressure, s.R * (b.pressure.front() - a.pressure.back()) / 2.0, 1e-10);

  const VectorField spin([](const Vec3& x) { return Vec3(-x[1], x[0], 0.0); });
  EXPECT_THROW(frozen_incompressible_residual(s, c, spin, rho_S, true, 6), HypothesisViolatedError);
  const FrozenSurfaceReport r = frozen_incompressible_residual(s, c, spin, rho_S, false, 6);
  EXPECT_LT(r.max_surface_divergence, 1e-9);
  EXPECT_LT(r.surface_continuity, 1e-9);
  EXPECT_GT(r.orthogonality_defect, 1e-3);
}
