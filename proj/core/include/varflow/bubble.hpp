#pragma once

// Spherically symmetric two-phase solver: barotropic Euler in the ball
// r < R(t) and the shell R(t) < r < R_out, coupled through a spherical
// interface that either carries surface mass and a surface law or is
// massless with constant tension. Finite volumes on grids that stretch with
// R(t), Rusanov fluxes with minmod reconstruction, classical RK4.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varflow/constitutive.hpp"
#include "varflow/helmholtz.hpp"

namespace varflow::bubble {

using constitutive::BarotropicLaw;
using constitutive::ConstantTension;

enum class System {
  CompressibleSurface,  // surface mass with law p_S
  ConstantTension,      // massless interface, jump P_A - P_B = -2 p0 / R
};

std::string system_name(System system);
System system_from_name(const std::string& name);

struct SolverConfig {
  double R0 = 1.0;
  double R_out = 2.0;
  BarotropicLaw law_A = BarotropicLaw::gamma_law(1.0, 1.4, constitutive::Phase::A);
  BarotropicLaw law_B = BarotropicLaw::quadratic(0.5, constitutive::Phase::B);
  std::optional<BarotropicLaw> law_S;
  std::optional<ConstantTension> tension;
  System system = System::CompressibleSurface;
  int nr_A = 64;
  int nr_B = 64;
  double cfl = 0.4;
  double t_end = 1.0;
  double output_dt = 0.1;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

struct InitialData {
  double rho_A0 = 1.0;
  double rho_B0 = 0.5;
  double rho_S0 = 0.2;
  /// Replace rho_A0 by the density balancing the interface at rest.
  bool equilibrium = true;
  /// rho_A(r) = rho_A0 (1 + amplitude exp(-(r / width)^2)).
  double amplitude = 0.0;
  double width = 0.3;
};

/// Conserved cell masses and momenta (integrals of rho and rho u over each
/// spherical cell) plus the interface state. Cells are uniform in r / R in
/// phase A and in (r - R) / (R_out - R) in phase B.
struct RadialTwoPhaseState {
  double t = 0.0;
  double R = 1.0;
  double Rdot = 0.0;          // for the massless interface: the last solved speed
  double surface_mass = 0.0;  // 4 pi R^2 rho_S, constant
  std::vector<double> mass_A;
  std::vector<double> momentum_A;
  std::vector<double> mass_B;
  std::vector<double> momentum_B;

  double rho_S() const;
};

/// Density of phase A that balances the interface at rest for the given
/// outer and surface densities.
double balanced_inner_density(const SolverConfig& config, double rho_B, double rho_S);

RadialTwoPhaseState initial_state(const SolverConfig& config, const InitialData& init);

/// Cell edges of each phase at interface radius R.
std::vector<double> edges_A(const SolverConfig& config, double R);
std::vector<double> edges_B(const SolverConfig& config, double R);

struct CellProfile {
  std::vector<double> r;  // cell centers
  std::vector<double> rho;
  std::vector<double> u;
  std::vector<double> pressure;  // total pressure
};
CellProfile profile_A(const RadialTwoPhaseState& s, const SolverConfig& config);
CellProfile profile_B(const RadialTwoPhaseState& s, const SolverConfig& config);

struct StateDerivative {
  std::vector<double> mass_A;
  std::vector<double> momentum_A;
  std::vector<double> mass_B;
  std::vector<double> momentum_B;
  double R = 0.0;
  double Rdot = 0.0;
  /// One-sided interface pressures used by the interface balance.
  double pressure_A = 0.0;
  double pressure_B = 0.0;
  double interface_speed = 0.0;

  double max_abs() const;
};

/// Semi-discrete right-hand side. Throws DomainError on vacuum cells or
/// when R leaves (0, R_out).
StateDerivative radial_rhs(const RadialTwoPhaseState& s, const SolverConfig& config);

/// Largest step allowed by the CFL number.
double stable_dt(const RadialTwoPhaseState& s, const SolverConfig& config);

/// One RK4 step. Throws CflViolationError when dt exceeds stable_dt and
/// InvariantError when the new state breaks positivity or 0 < R < R_out.
RadialTwoPhaseState step(const RadialTwoPhaseState& s, const SolverConfig& config, double dt);

struct ConservationRecord {
  double t = 0.0;
  double R = 0.0;
  double Rdot = 0.0;
  double rho_S = 0.0;
  double mass_total = 0.0;
  double mass_A = 0.0;
  double mass_B = 0.0;
  double mass_S = 0.0;
  double momentum = 0.0;  // magnitude of the total momentum vector
  double energy_kinetic = 0.0;
  double energy_internal = 0.0;
  double energy_total = 0.0;
  double surface_pressure = 0.0;
};

ConservationRecord measure(const RadialTwoPhaseState& s, const SolverConfig& config);

struct Trajectory {
  std::vector<ConservationRecord> records;  // at t = 0 and every output_dt
  RadialTwoPhaseState final_state;
  long steps = 0;
  std::vector<double> surface_pressure_sign_changes;  // times
};

/// Integrates to config.t_end with the CFL step, landing on output times.
Trajectory simulate(const SolverConfig& config, const RadialTwoPhaseState& initial);

struct ConservationReport {
  double mass_drift = 0.0;    // max |m(t) - m(0)| / m(0)
  double mass_A_drift = 0.0;
  double mass_B_drift = 0.0;
  double surface_mass_drift = 0.0;  // absolute, relative to the initial value when nonzero
  double energy_drift = 0.0;  // max |E(t) - E(0)| / |E(0)|
  double max_momentum = 0.0;
  /// The outer boundary term of the momentum balance vanishes by symmetry:
  /// the outward pressure force integrates n over the whole sphere.
  std::string momentum_note;
};

ConservationReport conservation_report(const std::vector<ConservationRecord>& records);

/// t,R,Rdot,rho_S,mass_total,mass_A,mass_B,energy_kinetic,energy_internal,energy_total
void write_timeseries_csv(std::ostream& os, const std::vector<ConservationRecord>& records);
/// r,rho,u,pressure
void write_profile_csv(std::ostream& os, const CellProfile& profile);

// -- frozen-time incompressible surface ------------------------------------------

struct FrozenSurfaceReport {
  double max_surface_divergence = 0.0;  // sup |div_Gamma v_S| at the quadrature nodes
  double surface_continuity = 0.0;      // sup |v_S . grad_Gamma rho_S + rho_S div_Gamma v_S|
  double orthogonality_defect = 0.0;
  double momentum_residual = 0.0;  // L2 norm of the balance with the recovered Pi_S
  double mean_pressure = 0.0;      // average of Pi_S over the sphere
  std::vector<double> coefficients;
};

/// Recovers Pi_S on the sphere of the state's radius from the surface
/// acceleration of a steady tangential field v_S and the cell pressures
/// adjacent to the interface. strict = true propagates
/// HypothesisViolatedError when the field is not a gradient-plus-normal field.
FrozenSurfaceReport frozen_incompressible_residual(const RadialTwoPhaseState& s,
                                                   const SolverConfig& config,
                                                   const VectorField& surface_velocity,
                                                   const ScalarField& surface_density,
                                                   bool strict = true,
                                                   int max_degree = helmholtz::kDefaultDegree);

}  // namespace varflow::bubble
