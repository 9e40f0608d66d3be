#include "varflow/corpus.hpp"

#include <cmath>

namespace varflow::corpus {

using constitutive::BarotropicLaw;
using constitutive::Phase;
using kinematics::BulkFlowMap;

namespace {

MultiphaseConfiguration base(const std::string& name, const BulkFlowMap& flow) {
  MultiphaseConfiguration c;
  c.name = name;
  c.A.flow = flow;
  c.B.flow = flow;
  c.S.flow = flow;
  c.A.law = BarotropicLaw::gamma_law(1.0, 1.4, Phase::A);
  c.B.law = BarotropicLaw::quadratic(0.5, Phase::B);
  c.S.law = BarotropicLaw::gamma_law(0.3, 2.0, Phase::S);
  c.S.tension = constitutive::ConstantTension{0.4};
  c.A.rho0 = ScalarField::constant(1.0);
  c.B.rho0 = ScalarField::constant(0.5);
  c.S.rho0 = ScalarField::constant(0.2);
  return c;
}

void nonuniform_densities(MultiphaseConfiguration& c) {
  c.A.rho0 = ScalarField(
      [](const Vec3& x) { return 1.0 + 0.2 * x[2] + 0.1 * x[0] * x[0] + 0.1 * x[0] * x[2]; },
      [](const Vec3& x) { return Vec3(0.2 * x[0] + 0.1 * x[2], 0.0, 0.2 + 0.1 * x[0]); });
  c.B.rho0 = ScalarField(
      [](const Vec3& x) { return 0.5 + 0.1 * x[0] * x[1] + 0.05 * x[1] * x[2]; },
      [](const Vec3& x) { return Vec3(0.1 * x[1], 0.1 * x[0] + 0.05 * x[2], 0.05 * x[1]); });
  c.S.rho0 = ScalarField([](const Vec3& x) { return 0.2 + 0.05 * x[2] + 0.02 * x[0] * x[1]; },
                         [](const Vec3& x) { return Vec3(0.02 * x[1], 0.02 * x[0], 0.05); });
}

/// Static configuration whose constant pressures satisfy the interface
/// balance on the reference sphere.
MultiphaseConfiguration equilibrium(bool with_tension) {
  MultiphaseConfiguration c = base(with_tension ? "equilibrium_tension" : "equilibrium",
                                   kinematics::identity_flow());
  c.B.law = BarotropicLaw::quadratic(1.0, Phase::B);
  c.B.rho0 = ScalarField::constant(1.0);
  c.A.law = BarotropicLaw::quadratic(1.0, Phase::A);
  const double pB = constitutive::total_pressure(c.B.law, 1.0);
  const double H = -2.0 / c.interface_radius;
  const double pS = with_tension ? c.S.tension->p0
                                 : constitutive::total_pressure(*c.S.law, c.S.rho0(Vec3::Zero()));
  const double pA = pB + pS * H;
  c.A.rho0 = ScalarField::constant(std::sqrt(pA));  // total pressure of rho^2 is rho^2
  return c;
}

double sq(double v) { return v * v; }

/// (1 - r^2 / a^2)^4 inside the ball of radius a, with its gradient.
struct BallBump {
  double a;
  double value(const Vec3& x) const {
    const double q = 1.0 - x.squaredNorm() / (a * a);
    return q > 0.0 ? sq(sq(q)) : 0.0;
  }
  Vec3 gradient(const Vec3& x) const {
    const double q = 1.0 - x.squaredNorm() / (a * a);
    return q > 0.0 ? Vec3(4.0 * q * q * q * (-2.0 / (a * a)) * x) : Vec3::Zero();
  }
};

/// ((r - r0)(r1 - r) / ((r1 - r0)/2)^2)^4 on the shell r0 < r < r1.
struct ShellBump {
  double r0;
  double r1;
  double value(const Vec3& x) const {
    const double r = x.norm();
    if (!(r > r0 && r < r1)) return 0.0;
    const double g = (r - r0) * (r1 - r) / sq(0.5 * (r1 - r0));
    return sq(sq(g));
  }
  Vec3 gradient(const Vec3& x) const {
    const double r = x.norm();
    if (!(r > r0 && r < r1)) return Vec3::Zero();
    const double c = 1.0 / sq(0.5 * (r1 - r0));
    const double g = (r - r0) * (r1 - r) * c;
    const double dg = ((r1 - r) - (r - r0)) * c;
    return 4.0 * g * g * g * dg * x / r;
  }
};

/// Smooth non-radial weight multiplying the bumps.
Vec3 bump_weight(const Vec3& x) { return Vec3(1.0 + x[0], x[1] * x[2] + 0.3, 0.5 - x[2]); }
Mat3 bump_weight_jacobian(const Vec3& x) {
  Mat3 W;
  W << 1.0, 0.0, 0.0, 0.0, x[2], x[1], 0.0, 0.0, -1.0;
  return W;
}

template <class Bump>
VectorField bumped(Bump b) {
  return VectorField([b](const Vec3& x) -> Vec3 { return b.value(x) * bump_weight(x); },
                     [b](const Vec3& x) -> Mat3 {
                       return bump_weight(x) * b.gradient(x).transpose() +
                              b.value(x) * bump_weight_jacobian(x);
                     });
}

VectorField zero_field() {
  return VectorField([](const Vec3&) -> Vec3 { return Vec3::Zero(); },
                     [](const Vec3&) -> Mat3 { return Mat3::Zero(); });
}

}  // namespace

std::vector<std::string> configuration_names() {
  return {"static_uniform", "static_nonuniform", "rotation",           "breathing",
          "swirl",          "equilibrium",       "equilibrium_tension"};
}

MultiphaseConfiguration make_configuration(const std::string& name) {
  if (name == "static_uniform") return base(name, kinematics::identity_flow());
  if (name == "static_nonuniform") {
    MultiphaseConfiguration c = base(name, kinematics::identity_flow());
    nonuniform_densities(c);
    return c;
  }
  if (name == "rotation") {
    MultiphaseConfiguration c = base(name, kinematics::rotation_flow(0.7));
    nonuniform_densities(c);
    return c;
  }
  if (name == "breathing") {
    MultiphaseConfiguration c = base(name, kinematics::breathing_flow(0.1, 2.0 * kPi, 2.0));
    nonuniform_densities(c);
    return c;
  }
  if (name == "swirl") {
    MultiphaseConfiguration c = base(name, kinematics::swirl_flow(1.0, 2.0));
    nonuniform_densities(c);
    return c;
  }
  if (name == "equilibrium") return equilibrium(false);
  if (name == "equilibrium_tension") return equilibrium(true);
  throw ConfigError("unknown configuration '" + name + "'");
}

std::vector<std::string> variation_names() {
  return {"interior_bump_A",         "interior_bump_B",    "normal_radial",
          "boundary_tangent_rotational", "tangential_surface_slip", "general_polynomial",
          "zero",                    "radial_surface_only"};
}

VariationField make_variation(const std::string& name, const MultiphaseConfiguration& config) {
  VariationField v;
  v.name = name;
  v.envelope = variational::TimeEnvelope{config.horizon};
  v.z_A = zero_field();
  v.z_B = zero_field();
  v.z_S = zero_field();
  const double R0 = config.interface_radius;
  const double R1 = config.outer_radius;
  // Vanishes on the outer sphere.
  auto outer_cut = [R1](const Vec3& x) { return 1.0 - x.squaredNorm() / (R1 * R1); };
  auto outer_cut_grad = [R1](const Vec3& x) -> Vec3 { return -2.0 / (R1 * R1) * x; };

  if (name == "interior_bump_A") {
    v.z_A = bumped(BallBump{0.8 * R0});
  } else if (name == "interior_bump_B") {
    v.z_B = bumped(ShellBump{R0 + 0.2 * (R1 - R0), R0 + 0.8 * (R1 - R0)});
  } else if (name == "normal_radial") {
    const VectorField z(
        [=](const Vec3& x) -> Vec3 { return outer_cut(x) * (0.5 + 0.3 * x[2]) * x; },
        [=](const Vec3& x) -> Mat3 {
          const double f = outer_cut(x) * (0.5 + 0.3 * x[2]);
          const Vec3 gf = outer_cut_grad(x) * (0.5 + 0.3 * x[2]) + outer_cut(x) * Vec3(0, 0, 0.3);
          return f * Mat3::Identity() + x * gf.transpose();
        });
    v.z_A = v.z_B = v.z_S = z;
  } else if (name == "boundary_tangent_rotational") {
    // x cross grad Y with Y = x1 x3 + 0.7 x2 + x1 x2: tangent to every sphere
    // about the origin, divergence free in the bulk and on those spheres.
    const VectorField z(
        [](const Vec3& x) -> Vec3 {
          return x.cross(Vec3(x[2] + x[1], 0.7 + x[0], x[0]));
        },
        [](const Vec3& x) -> Mat3 {
          const Vec3 g(x[2] + x[1], 0.7 + x[0], x[0]);
          Mat3 G;
          G << 0, 1, 1, 1, 0, 0, 1, 0, 0;
          Mat3 J;
          for (int j = 0; j < 3; ++j) J.col(j) = Vec3::Unit(j).cross(g) + x.cross(G.col(j));
          return J;
        });
    v.z_A = v.z_B = v.z_S = z;
    v.surface_divergence_free = true;
  } else if (name == "tangential_surface_slip") {
    // r^2 w - (x . w) x: tangent to every sphere about the origin.
    v.z_S = VectorField(
        [](const Vec3& x) -> Vec3 {
          const Vec3 w(x[1], x[2] * x[2], 1.0);
          return x.squaredNorm() * w - x.dot(w) * x;
        },
        [](const Vec3& x) -> Mat3 {
          const Vec3 w(x[1], x[2] * x[2], 1.0);
          Mat3 W;
          W << 0, 1, 0, 0, 0, 2.0 * x[2], 0, 0, 0;
          return 2.0 * w * x.transpose() + x.squaredNorm() * W -
                 x * (w + W.transpose() * x).transpose() - x.dot(w) * Mat3::Identity();
        });
  } else if (name == "general_polynomial") {
    const VectorField z(
        [=](const Vec3& x) -> Vec3 {
          return outer_cut(x) * Vec3(x[0] * x[1] + 0.4 + 0.3 * x[2], 0.5 + x[2] * x[2] + 0.3 * x[0],
                                     x[0] - x[1] * x[2] + 0.2 * x[2] * x[2] + 0.6 * x[2]);
        },
        [=](const Vec3& x) -> Mat3 {
          const Vec3 p(x[0] * x[1] + 0.4 + 0.3 * x[2], 0.5 + x[2] * x[2] + 0.3 * x[0],
                       x[0] - x[1] * x[2] + 0.2 * x[2] * x[2] + 0.6 * x[2]);
          Mat3 P;
          P << x[1], x[0], 0.3, 0.3, 0, 2.0 * x[2], 1, -x[2], -x[1] + 0.4 * x[2] + 0.6;
          return outer_cut(x) * P + p * outer_cut_grad(x).transpose();
        });
    v.z_A = v.z_B = v.z_S = z;
  } else if (name == "zero") {
  } else if (name == "radial_surface_only") {
    v.z_S = VectorField([](const Vec3& x) -> Vec3 { return x; },
                        [](const Vec3&) -> Mat3 { return Mat3::Identity(); });
  } else {
    throw ConfigError("unknown variation '" + name + "'");
  }
  return v;
}

std::vector<CorpusPair> identity_corpus() {
  using K = ActionKind;
  return {
      {"static_uniform", "interior_bump_A", K::CompressibleSurface},
      {"static_uniform", "interior_bump_B", K::CompressibleSurface},
      {"static_uniform", "normal_radial", K::CompressibleSurface},
      {"static_uniform", "normal_radial", K::ConstantTension},
      {"static_nonuniform", "general_polynomial", K::CompressibleSurface},
      {"static_nonuniform", "tangential_surface_slip", K::CompressibleSurface},
      {"rotation", "interior_bump_A", K::CompressibleSurface},
      {"rotation", "boundary_tangent_rotational", K::IncompressibleSurface},
      {"rotation", "general_polynomial", K::CompressibleSurface},
      {"breathing", "normal_radial", K::CompressibleSurface},
      {"breathing", "general_polynomial", K::IncompressibleSurface},
      {"breathing", "normal_radial", K::ConstantTension},
      {"swirl", "interior_bump_B", K::CompressibleSurface},
      {"swirl", "tangential_surface_slip", K::CompressibleSurface},
      {"swirl", "general_polynomial", K::ConstantTension},
  };
}

ActionKind action_kind_from_name(const std::string& name) {
  if (name == "compressible-surface") return ActionKind::CompressibleSurface;
  if (name == "incompressible-surface") return ActionKind::IncompressibleSurface;
  if (name == "constant-tension") return ActionKind::ConstantTension;
  throw ConfigError("unknown action '" + name + "'");
}

}  // namespace varflow::corpus
