#include <cmath>

#include <gtest/gtest.h>

#include "varflow/corpus.hpp"
#include "varflow/variational.hpp"

using namespace varflow;
using namespace varflow::variational;

namespace {

// Reduced levels so that each identity check stays within a few seconds.
Discretization fine_level() { return Discretization::coarse(); }

Discretization coarse_level() {
  Discretization d = Discretization::coarse();
  d.time_nodes = 8;
  d.radial_per_panel = 3;
  d.directions = {6, 6, {}};
  d.surface = {8, 8, {}};
  return d;
}

}  // namespace

TEST(TimeEnvelope, VanishesAtEndsAndOnTail) {
  const TimeEnvelope e{2.0, 0.05};
  EXPECT_DOUBLE_EQ(e.cutoff(), 1.9);
  EXPECT_EQ(e(0.0), 0.0);
  EXPECT_EQ(e(1.9), 0.0);
  EXPECT_EQ(e(1.95), 0.0);
  EXPECT_EQ(e(2.0), 0.0);
  for (double t = 0.05; t < 1.9; t += 0.1) EXPECT_GT(e(t), 0.0);
}

TEST(TimeEnvelope, DerivativeMatchesDifferences) {
  const TimeEnvelope e{1.0, 0.05};
  for (double t : {0.1, 0.4, 0.7, 0.9}) {
    EXPECT_NEAR(e.derivative(t), central_diff4([&](double s) { return e(s); }, t, 1e-4), 1e-6);
  }
}

TEST(Richardson, RecoversDerivativeOfSmoothFunction) {
  const auto f = [](double x) { return std::sin(1.0 + x) + x * x * x; };
  const FdDerivative d = richardson_derivative(f, kDefaultLadder, 1.0);
  EXPECT_EQ(d.central_differences.size(), 3u);
  EXPECT_NEAR(d.derivative, std::cos(1.0), 1e-11);
  // The central differences themselves are off by O(eps^2).
  EXPECT_GT(std::abs(d.central_differences[0] - std::cos(1.0)), 1e-6);
}

TEST(Configurations, CorpusIsAdmissible) {
  for (const std::string& name : corpus::configuration_names()) {
    const MultiphaseConfiguration c = corpus::make_configuration(name);
    EXPECT_NO_THROW(c.validate()) << name;
  }
  EXPECT_THROW(corpus::make_configuration("nope"), ConfigError);
}

TEST(Variations, CorpusIsAdmissibleExceptTheRejectedField) {
  const MultiphaseConfiguration c = corpus::make_configuration("breathing");
  for (const std::string& name : corpus::variation_names()) {
    const VariationField v = corpus::make_variation(name, c);
    if (name == "radial_surface_only") {
      try {
        v.validate(c);
        ADD_FAILURE() << "radial_surface_only accepted";
      } catch (const ConstraintError& e) {
        EXPECT_NE(std::string(e.what()).find("normal matching"), std::string::npos) << e.what();
      }
    } else {
      EXPECT_NO_THROW(v.validate(c)) << name;
    }
  }
}

TEST(Variations, NormalFieldOnOuterBoundaryIsRejected) {
  const MultiphaseConfiguration c = corpus::make_configuration("static_uniform");
  VariationField v;
  v.name = "radial_everywhere";
  const VectorField radial([](const Vec3& x) { return x; });
  v.z_A = radial;
  v.z_B = radial;
  v.z_S = radial;
  EXPECT_THROW(v.validate(c), ConstraintError);
}

TEST(Perturbation, ZeroSizeLeavesFlowsUnchanged) {
  const MultiphaseConfiguration c = corpus::make_configuration("swirl");
  const VariationField v = corpus::make_variation("general_polynomial", c);
  const MultiphaseConfiguration p = perturbed_config(c, v, 0.0);
  for (const Vec3& xi : {Vec3(0.1, 0.2, 0.3), Vec3(0.9, -0.8, 0.5)}) {
    EXPECT_EQ(p.A.flow(xi, 0.4), c.A.flow(xi, 0.4));
    EXPECT_EQ(p.B.flow(xi, 0.4), c.B.flow(xi, 0.4));
  }
}

TEST(Perturbation, AffineFieldScalesMetricByDeterminant) {
  const MultiphaseConfiguration c = corpus::make_configuration("static_uniform");
  Mat3 M;
  M << 0.3, 0.1, 0.0, -0.2, 0.5, 0.4, 0.1, 0.0, -0.6;
  VariationField v;
  v.z_A = VectorField([M](const Vec3& x) { return (M * x).eval(); }, [M](const Vec3&) { return M; });
  const double eps = 0.05;
  const double t = 0.4;
  const MultiphaseConfiguration p = perturbed_config(c, v, eps);
  const Vec3 xi(0.2, -0.1, 0.3);
  const double expected = (Mat3::Identity() + eps * v.envelope(t) * M).determinant();
  EXPECT_NEAR(kinematics::bulk_sqrt_metric(p.A.flow, xi, t), expected, 1e-10);
}

TEST(Action, StaticConfigurationClosedForms) {
  const MultiphaseConfiguration c = corpus::make_configuration("static_uniform");
  const double R = c.interface_radius;
  const double Ro = c.outer_radius;
  const double T = c.horizon;
  const Vec3 probe(0.1, 0.2, 0.3);
  const double pA = c.A.law.p(c.A.rho0(probe));
  const double pB = c.B.law.p(c.B.rho0(probe));
  const double pS = c.S.law->p(c.S.rho0(probe));
  const double vol_A = 4.0 / 3.0 * kPi * R * R * R;
  const double vol_B = 4.0 / 3.0 * kPi * (Ro * Ro * Ro - R * R * R);
  const double area = 4.0 * kPi * R * R;
  const Discretization d = fine_level();
  const ActionValue a = action(c, ActionKind::CompressibleSurface, d);
  EXPECT_NEAR(a.value, -T * (pA * vol_A + pB * vol_B + pS * area), 1e-10 * std::abs(a.value));
  EXPECT_NEAR(a.kinetic_A, 0.0, 1e-14);
  EXPECT_NEAR(a.kinetic_S, 0.0, 1e-14);
  const ActionValue t = action(c, ActionKind::ConstantTension, d);
  EXPECT_NEAR(t.value, -T * (pA * vol_A + pB * vol_B) + 0.5 * c.S.tension->p0 * area * T,
              1e-10 * std::abs(t.value));
}

TEST(Action, RotationKineticEnergy) {
  // Rigid rotation of a uniform ball: int rho |v|^2 / 2 = rho w^2 (4 pi R^5 / 15) per unit time.
  MultiphaseConfiguration c = corpus::make_configuration("static_uniform");
  const double w = 0.7;
  c.A.flow = c.B.flow = c.S.flow = kinematics::rotation_flow(w);
  const double rho = c.A.rho0(Vec3(0.1, 0.2, 0.3));
  const double R = c.interface_radius;
  const ActionValue a = action(c, ActionKind::CompressibleSurface, fine_level());
  EXPECT_NEAR(a.kinetic_A, c.horizon * rho * w * w * 4.0 * kPi * std::pow(R, 5) / 15.0,
              1e-8 * a.kinetic_A);
}

TEST(FirstVariation, ZeroVariationHasZeroDerivative) {
  const MultiphaseConfiguration c = corpus::make_configuration("breathing");
  const VariationField z = corpus::make_variation("zero", c);
  const ReferenceQuadrature q = ReferenceQuadrature::build(c, coarse_level());
  EXPECT_EQ(first_variation_rhs(c, z, ActionKind::CompressibleSurface, q).total(), 0.0);
  EXPECT_NEAR(action_derivative_fd(c, z, ActionKind::CompressibleSurface, kDefaultLadder, q).derivative,
              0.0, 1e-12);
}

TEST(FirstVariation, InterfaceTermsCombine) {
  const MultiphaseConfiguration c = corpus::make_configuration("swirl");
  const VariationField v = corpus::make_variation("normal_radial", c);
  const ReferenceQuadrature q = ReferenceQuadrature::build(c, coarse_level());
  const FirstVariationTerms t = first_variation_rhs(c, v, ActionKind::CompressibleSurface, q);
  EXPECT_NEAR(t.interface_A + t.interface_B, t.interface_combined,
              1e-12 * std::max(1.0, std::abs(t.interface_combined)));
}

TEST(FirstVariation, OuterBoundaryTermVanishesForTangentFields) {
  const MultiphaseConfiguration c = corpus::make_configuration("rotation");
  const VariationField v = corpus::make_variation("boundary_tangent_rotational", c);
  const ReferenceQuadrature q = ReferenceQuadrature::build(c, coarse_level());
  EXPECT_NEAR(first_variation_rhs(c, v, ActionKind::CompressibleSurface, q).outer_boundary, 0.0, 1e-10);
}

struct PairCase {
  const char* configuration;
  const char* variation;
  ActionKind kind;
};

class IdentityPair : public ::testing::TestWithParam<PairCase> {};

TEST_P(IdentityPair, FiniteDifferenceMatchesClosedForm) {
  const PairCase& pc = GetParam();
  const MultiphaseConfiguration c = corpus::make_configuration(pc.configuration);
  const VariationField v = corpus::make_variation(pc.variation, c);
  const IdentityCheck r = check_first_variation(c, v, pc.kind, fine_level(), coarse_level());
  EXPECT_TRUE(r.within_tolerance) << r.test << ": mismatch " << r.mismatch << " tol " << r.tolerance;
  EXPECT_TRUE(r.refines) << r.test << ": coarse " << r.coarse_mismatch << " fine " << r.mismatch;
  EXPECT_EQ(r.pass, r.within_tolerance && r.refines);
}

INSTANTIATE_TEST_SUITE_P(
    Corpus, IdentityPair,
    ::testing::Values(PairCase{"static_nonuniform", "interior_bump_A", ActionKind::CompressibleSurface},
                      PairCase{"rotation", "interior_bump_B", ActionKind::CompressibleSurface},
                      PairCase{"breathing", "normal_radial", ActionKind::CompressibleSurface},
                      PairCase{"breathing", "normal_radial", ActionKind::ConstantTension}));

TEST(EnergyParts, TensionVariationMatchesDifference) {
  const MultiphaseConfiguration c = corpus::make_configuration("breathing");
  const VariationField v = corpus::make_variation("normal_radial", c);
  const IdentityCheck r = check_energy_part(c, v, EnergyPart::Tension, 0.4, fine_level(), coarse_level());
  EXPECT_TRUE(r.pass) << r.mismatch << " vs " << r.tolerance;
}

TEST(EnergyParts, InternalBulkVariationMatchesDifference) {
  const MultiphaseConfiguration c = corpus::make_configuration("breathing");
  const VariationField v = corpus::make_variation("general_polynomial", c);
  const IdentityCheck r =
      check_energy_part(c, v, EnergyPart::InternalA, 0.4, fine_level(), coarse_level());
  EXPECT_TRUE(r.pass) << r.mismatch << " vs " << r.tolerance;
}

TEST(EulerLagrange, EquilibriaSatisfyTheSystem) {
  const EulerLagrangeReport r = euler_lagrange_residuals(corpus::make_configuration("equilibrium"),
                                                         ActionKind::CompressibleSurface, 0.3);
  EXPECT_LT(std::max({r.momentum_A, r.momentum_B, r.momentum_S}), 1e-8);
  EXPECT_LT(std::max({r.continuity_A, r.continuity_B, r.continuity_S}), 1e-8);
  const EulerLagrangeReport t = euler_lagrange_residuals(
      corpus::make_configuration("equilibrium_tension"), ActionKind::ConstantTension, 0.3);
  EXPECT_LT(std::max({t.momentum_A, t.momentum_B, t.momentum_S}), 1e-8);
}

TEST(EulerLagrange, NonSolutionIsDetected) {
  // Breathing flow is kinematically admissible but not a solution.
  const EulerLagrangeReport r = euler_lagrange_residuals(corpus::make_configuration("breathing"),
                                                         ActionKind::CompressibleSurface, 0.3);
  EXPECT_GT(std::max({r.momentum_A, r.momentum_B, r.momentum_S}), 1e-3);
  EXPECT_LT(std::max({r.continuity_A, r.continuity_B, r.continuity_S}), 1e-7);
}

TEST(Names, ActionKindsRoundTrip) {
  for (ActionKind k : {ActionKind::CompressibleSurface, ActionKind::IncompressibleSurface,
                       ActionKind::ConstantTension}) {
    EXPECT_EQ(corpus::action_kind_from_name(action_name(k)), k);
  }
}
