#pragma once

// Action integrals of two bulk phases separated by a moving interface, their
// perturbation by Eulerian variation fields, finite-difference derivatives
// with respect to the perturbation size, the quadrature of the closed-form
// first variation, and Euler-Lagrange residuals.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varflow/constitutive.hpp"
#include "varflow/fields.hpp"
#include "varflow/kinematics.hpp"
#include "varflow/quadrature_rules.hpp"
#include "varflow/surface_geometry.hpp"

namespace varflow::variational {

using constitutive::BarotropicLaw;
using constitutive::ConstantTension;
using kinematics::BulkFlowMap;

struct BulkPhase {
  BulkFlowMap flow;
  BarotropicLaw law = BarotropicLaw::quadratic();
  ScalarField rho0 = ScalarField::constant(1.0);
};

/// The interface is carried by `flow` restricted to the reference sphere.
/// Either `law` (compressible surface) or `tension` (massless interface with
/// constant tension) is used, depending on the action.
struct SurfacePhase {
  BulkFlowMap flow;
  std::optional<BarotropicLaw> law;
  ScalarField rho0 = ScalarField::constant(0.0);
  std::optional<ConstantTension> tension;
};

/// Phase A fills the ball |x| < interface_radius at t = 0, phase B the shell
/// up to the fixed outer sphere |x| = outer_radius.
struct MultiphaseConfiguration {
  std::string name;
  BulkPhase A;
  BulkPhase B;
  SurfacePhase S;
  double interface_radius = 1.0;
  double outer_radius = 2.0;
  double horizon = 1.0;

  /// Probes interface compatibility of the three maps on the reference
  /// sphere and the velocity constraints on the interface and the outer
  /// boundary. Throws ConstraintError naming the first violated condition.
  void validate(int probes = 200, std::uint64_t seed = 7, double tol = 1e-10) const;
};

/// C-infinity time envelope e(t): positive on (0, T - delta), identically zero
/// on [T - delta, T], delta = fraction * T; e(0) = 0.
struct TimeEnvelope {
  double horizon = 1.0;
  double fraction = 0.05;

  double cutoff() const { return horizon * (1.0 - fraction); }
  double operator()(double t) const;
  double derivative(double t) const;
};

/// Perturbation direction z_*(x, t) = e(t) shape_*(x).
struct VariationField {
  std::string name;
  VectorField z_A = VectorField::constant(Vec3::Zero());
  VectorField z_B = VectorField::constant(Vec3::Zero());
  VectorField z_S = VectorField::constant(Vec3::Zero());
  TimeEnvelope envelope;
  bool surface_divergence_free = false;
  bool terminal_zero = true;

  Vec3 value(const VectorField& shape, const Vec3& x, double t) const {
    return envelope(t) * shape(x);
  }

  /// Normal matching on the interface, tangency on the outer boundary, the
  /// vanishing at t = 0 and t = T, and (if flagged) div_Gamma z_S = 0.
  /// Throws ConstraintError naming the violated condition.
  void validate(const MultiphaseConfiguration& config, int probes = 200, std::uint64_t seed = 11,
                double tol = 1e-10) const;
};

enum class ActionKind { CompressibleSurface, IncompressibleSurface, ConstantTension };

std::string action_name(ActionKind kind);

/// Node counts of the space-time quadrature.
struct Discretization {
  int time_nodes = 24;       // on [0, T - delta]; a quarter of that on the tail
  int radial_per_panel = 8;  // per radial panel in each bulk phase
  geometry::QuadratureOptions directions{16, 16, {}};
  geometry::QuadratureOptions surface{24, 24, {}};
  /// Radial panel breaks relative to the interface radius (phase A) and
  /// inside the shell (phase B, as fractions of R_out - R_0).
  std::vector<double> breaks_A{0.0, 0.8, 1.0};
  std::vector<double> breaks_B{0.0, 0.2, 0.8, 1.0};

  static Discretization coarse();
  static Discretization standard() { return {}; }
};

struct ActionValue {
  double value = 0.0;
  double kinetic_A = 0.0;
  double internal_A = 0.0;
  double kinetic_B = 0.0;
  double internal_B = 0.0;
  double kinetic_S = 0.0;
  double internal_S = 0.0;

  double magnitude() const;
};

/// Reference-coordinate quadrature nodes shared by all evaluations.
struct ReferenceQuadrature {
  Rule1D time;
  kinematics::VolumeQuadrature bulk_A;
  kinematics::VolumeQuadrature bulk_B;
  geometry::ChartAtlas interface_atlas = geometry::ChartAtlas::sphere(1.0);
  geometry::SurfaceQuadrature interface;
  geometry::ChartAtlas outer_atlas = geometry::ChartAtlas::sphere(2.0);
  geometry::SurfaceQuadrature outer;
  /// Chart tangents and area elements of the reference interface nodes.
  std::vector<Mat32> interface_tangents;
  std::vector<double> interface_area0;

  static ReferenceQuadrature build(const MultiphaseConfiguration& config,
                                   const Discretization& disc);
};

/// Space-time action. For ConstantTension the surface part is the integral of
/// p0/2 and carries no kinetic term; IncompressibleSurface drops p_S.
ActionValue action(const MultiphaseConfiguration& config, ActionKind kind,
                   const ReferenceQuadrature& quad);
ActionValue action(const MultiphaseConfiguration& config, ActionKind kind,
                   const Discretization& disc = {});

/// Flow maps x + eps z(x, t) per phase. eps = 0 returns the configuration
/// unchanged. Throws SingularMetricError if a perturbed metric is not positive
/// at a probe.
MultiphaseConfiguration perturbed_config(const MultiphaseConfiguration& config,
                                         const VariationField& variation, double eps);

/// y(xi, t) = z(x(xi, t), t) for the phase selected by `phase`.
Vec3 induced_reference_variation(const MultiphaseConfiguration& config,
                                 const VariationField& variation, constitutive::Phase phase,
                                 const Vec3& xi, double t);

struct FdDerivative {
  double derivative = 0.0;
  double richardson_error = 0.0;
  std::vector<double> central_differences;  // one per ladder rung
};

/// Default ladder: eps = 1e-2, 5e-3, 2.5e-3 (each used with both signs).
inline const std::vector<double> kDefaultLadder{1e-2, 5e-3, 2.5e-3};

/// Central differences on a halving ladder, extrapolated twice.
FdDerivative richardson_derivative(const std::function<double(double)>& f,
                                   const std::vector<double>& ladder, double magnitude);

FdDerivative action_derivative_fd(const MultiphaseConfiguration& config,
                                  const VariationField& variation, ActionKind kind,
                                  const std::vector<double>& ladder,
                                  const ReferenceQuadrature& quad);

/// The six space-time integrals of the first variation.
struct FirstVariationTerms {
  double bulk_A = 0.0;          // -int (rho_A D_t v_A + grad P_A) . z_A
  double bulk_B = 0.0;          // -int (rho_B D_t v_B + grad P_B) . z_B
  double surface = 0.0;         // -int (rho_S D_t v_S + grad_G P_S + P_S H n) . z_S
  double interface_A = 0.0;     // +int P_A n . z_A on the interface
  double interface_B = 0.0;     // -int P_B n . z_B on the interface
  double outer_boundary = 0.0;  // +int P_B n_Omega . z_B on the outer sphere
  /// int (P_A - P_B) n . z_S: the combined interface statement.
  double interface_combined = 0.0;

  double total() const {
    return bulk_A + bulk_B + surface + interface_A + interface_B + outer_boundary;
  }
};

/// Quadrature of the closed-form first variation. For ConstantTension the
/// surface pressure is p0/2 (the total pressure of the constant density
/// -p0/2), for IncompressibleSurface it is zero.
FirstVariationTerms first_variation_rhs(const MultiphaseConfiguration& config,
                                        const VariationField& variation, ActionKind kind,
                                        const ReferenceQuadrature& quad);

// -- single-energy variation formulas -----------------------------------------

enum class EnergyPart { KineticA, KineticB, KineticS, InternalA, InternalB, InternalS, Tension };

std::string energy_part_name(EnergyPart part);

/// Kinetic parts are space-time integrals; internal parts and the tension
/// part are evaluated at the single time t.
double energy_part(const MultiphaseConfiguration& config, EnergyPart part,
                   const ReferenceQuadrature& quad, double t);

/// Closed-form derivative of energy_part along a variation:
/// kinetic: -int rho D_t v . z; internal: int (p - rho p') div z;
/// tension: (p0/2) int div_Gamma z_S.
double energy_part_variation(const MultiphaseConfiguration& config,
                             const VariationField& variation, EnergyPart part,
                             const ReferenceQuadrature& quad, double t);

struct IdentityCheck {
  std::string test;
  double dA_fd = 0.0;
  double rhs = 0.0;
  double richardson_error = 0.0;
  double quadrature_delta = 0.0;
  double mismatch = 0.0;         // |dA_fd - rhs| at the standard level
  double coarse_mismatch = 0.0;  // same with coarse quadrature and doubled eps
  double tolerance = 0.0;        // richardson_error + quadrature_delta
  bool within_tolerance = false;
  /// coarse_mismatch >= mismatch, or both below the estimated truncation error.
  bool refines = false;
  bool pass = false;  // within_tolerance && refines
  FirstVariationTerms terms;
};

/// Compares the finite-difference derivative of the action with the closed
/// form at the standard and coarse levels.
IdentityCheck check_first_variation(const MultiphaseConfiguration& config,
                                    const VariationField& variation, ActionKind kind,
                                    const Discretization& fine = {},
                                    const Discretization& coarse = Discretization::coarse());

/// Same for a single energy part (t ignored for kinetic parts).
IdentityCheck check_energy_part(const MultiphaseConfiguration& config,
                                const VariationField& variation, EnergyPart part, double t,
                                const Discretization& fine = {},
                                const Discretization& coarse = Discretization::coarse());

// -- Euler-Lagrange residuals -------------------------------------------------

struct EulerLagrangeReport {
  double momentum_A = 0.0;
  double momentum_B = 0.0;
  double momentum_S = 0.0;
  double continuity_A = 0.0;
  double continuity_B = 0.0;
  double continuity_S = 0.0;
  double surface_divergence = 0.0;  // incompressible surface only
};

/// Sup norms at seeded random probes of the momentum balances and the
/// continuity equations at time t. For IncompressibleSurface the surface
/// pressure is `surface_pressure` (required); for ConstantTension the surface
/// balance is p0 H n + (P_B - P_A) n with no surface mass.
EulerLagrangeReport euler_lagrange_residuals(const MultiphaseConfiguration& config,
                                             ActionKind kind, double t, int probes = 64,
                                             std::uint64_t seed = 5,
                                             const std::optional<ScalarField>& surface_pressure = {});

// -- pointwise fields used by the residuals and the closed forms --------------

/// Eulerian density and pressure data of a bulk phase at the image of xi.
struct BulkPointState {
  Vec3 x;
  double sqrt_g;
  double rho;
  Vec3 acceleration;
  Vec3 grad_pressure;  // gradient of the total pressure
  double pressure;     // total pressure
};
BulkPointState bulk_point_state(const BulkPhase& phase, const Vec3& xi, double t);

struct SurfacePointState {
  Vec3 x;
  Vec3 normal;
  double mean_curvature;
  double area_ratio;
  double rho;
  Vec3 acceleration;
  Vec3 grad_rho;  // surface gradient of rho_S
};
SurfacePointState surface_point_state(const kinematics::MovingSurface& surface,
                                      const ScalarField& rho0, const geometry::SurfacePoint& p,
                                      double t);

}  // namespace varflow::variational
