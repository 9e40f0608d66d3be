#include <cmath>
#include <random>

#include "suites.hpp"
#include "varflow/constitutive.hpp"
#include "varflow/kinematics.hpp"
#include "varflow/quadrature_rules.hpp"
#include "varflow/surface_geometry.hpp"

namespace varflow::cli {

namespace {

using geometry::ChartAtlas;
using geometry::SurfacePoint;

constexpr const char* kSuite = "verify";

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

/// Polynomial vector fields with analytic Jacobians used by the
/// divergence-theorem checks.
std::vector<std::pair<std::string, VectorField>> polynomial_fields() {
  std::vector<std::pair<std::string, VectorField>> out;
  auto add = [&](std::string name, auto f, auto j) { out.emplace_back(std::move(name), VectorField(f, j)); };
  add("constant", [](const Vec3&) { return Vec3(1.0, -2.0, 0.5); },
      [](const Vec3&) { return Mat3::Zero().eval(); });
  add("position", [](const Vec3& x) { return x; }, [](const Vec3&) { return Mat3::Identity().eval(); });
  add("x3^2 e1", [](const Vec3& x) { return Vec3(x[2] * x[2], 0.0, 0.0); },
      [](const Vec3& x) {
        Mat3 J = Mat3::Zero();
        J(0, 2) = 2.0 * x[2];
        return J;
      });
  add("x1 x2 e3", [](const Vec3& x) { return Vec3(0.0, 0.0, x[0] * x[1]); },
      [](const Vec3& x) {
        Mat3 J = Mat3::Zero();
        J(2, 0) = x[1];
        J(2, 1) = x[0];
        return J;
      });
  add("rotation e3 x x", [](const Vec3& x) { return Vec3(-x[1], x[0], 0.0); },
      [](const Vec3&) {
        Mat3 J = Mat3::Zero();
        J(0, 1) = -1.0;
        J(1, 0) = 1.0;
        return J;
      });
  add("x1^2 x", [](const Vec3& x) { return (x[0] * x[0] * x).eval(); },
      [](const Vec3& x) {
        Mat3 J = x[0] * x[0] * Mat3::Identity();
        J.col(0) += 2.0 * x[0] * x;
        return J;
      });
  add("(x2 x3, x1 x3, x1 x2)", [](const Vec3& x) { return Vec3(x[1] * x[2], x[0] * x[2], x[0] * x[1]); },
      [](const Vec3& x) {
        Mat3 J;
        J << 0.0, x[2], x[1], x[2], 0.0, x[0], x[1], x[0], 0.0;
        return J;
      });
  add("(x1^3, x2^2, x3)", [](const Vec3& x) { return Vec3(x[0] * x[0] * x[0], x[1] * x[1], x[2]); },
      [](const Vec3& x) {
        Mat3 J = Mat3::Zero();
        J(0, 0) = 3.0 * x[0] * x[0];
        J(1, 1) = 2.0 * x[1];
        J(2, 2) = 1.0;
        return J;
      });
  add("(1 + x3) e1 + x1 e3", [](const Vec3& x) { return Vec3(1.0 + x[2], 0.0, x[0]); },
      [](const Vec3&) {
        Mat3 J = Mat3::Zero();
        J(0, 2) = 1.0;
        J(2, 0) = 1.0;
        return J;
      });
  add("(x1 x2 x3, x3^2 - x1, x2^3)",
      [](const Vec3& x) { return Vec3(x[0] * x[1] * x[2], x[2] * x[2] - x[0], x[1] * x[1] * x[1]); },
      [](const Vec3& x) {
        Mat3 J;
        J << x[1] * x[2], x[0] * x[2], x[0] * x[1], -1.0, 0.0, 2.0 * x[2], 0.0, 3.0 * x[1] * x[1], 0.0;
        return J;
      });
  return out;
}

void geometry_checks(const SuiteContext& ctx, std::vector<Record>& out) {
  const double s = ctx.tol_scale;
  const YAML::Node sec = ctx.config["verify"];
  const int probes = get_or(sec, "partition_probes", 10000);
  std::mt19937_64 rng(ctx.seed);

  const ChartAtlas unit = ChartAtlas::sphere(1.0);
  const ChartAtlas ell = ChartAtlas::ellipsoid(2.0, 1.0, 1.0);
  double pu_sphere = 0.0;
  double pu_ell = 0.0;
  for (int k = 0; k < probes; ++k) {
    const Vec3 d = random_direction(rng);
    pu_sphere = std::max(pu_sphere, std::abs(unit.partition_sum(d) - 1.0));
    pu_ell = std::max(pu_ell, std::abs(ell.partition_sum(Vec3(2.0 * d[0], d[1], d[2])) - 1.0));
  }
  out.push_back(make_check(kSuite, "partition_of_unity", "unit sphere, random points", pu_sphere,
                           0.0, pu_sphere, 1e-12, s));
  out.push_back(make_check(kSuite, "partition_of_unity", "ellipsoid (2,1,1), random points",
                           pu_ell, 0.0, pu_ell, 1e-12, s));

  const auto quad = geometry::make_quadrature(unit);
  out.push_back(relative_check(kSuite, "sphere_area", "unit sphere",
                               geometry::integrate_surface(quad, ScalarField::constant(1.0)),
                               4.0 * kPi, 1e-8, s));
  out.push_back(absolute_check(
      kSuite, "surface_moment", "int x3 over unit sphere",
      geometry::integrate_surface(quad, ScalarField([](const Vec3& x) { return x[2]; })), 0.0,
      1e-10, s));
  out.push_back(relative_check(
      kSuite, "surface_moment", "int x3^2 over unit sphere",
      geometry::integrate_surface(quad, ScalarField([](const Vec3& x) { return x[2] * x[2]; })),
      4.0 * kPi / 3.0, 1e-8, s));

  for (double R : {0.5, 1.0, 2.0, 5.0}) {
    const ChartAtlas sph = ChartAtlas::sphere(R);
    const auto q = geometry::make_quadrature(sph);
    double worst = 0.0;
    for (const SurfacePoint& p : q.nodes) {
      worst = std::max(worst, std::abs(geometry::mean_curvature(sph, p) + 2.0 / R));
    }
    out.push_back(make_check(kSuite, "mean_curvature_sphere", "R = " + format_number(R),
                             -2.0 / R, -2.0 / R, worst, 1e-8, s));
  }
  {
    const ChartAtlas plane = ChartAtlas::plane_patch();
    const double H = geometry::mean_curvature(plane, plane.point(0, Vec2(0.3, -0.2)));
    out.push_back(absolute_check(kSuite, "mean_curvature_plane", "flat patch", H, 0.0, 1e-12, s));
  }

  auto at = [](const ChartAtlas& a, const Vec3& x) { return *a.locate(x); };
  {
    const Vec3 n = geometry::unit_normal(ell, at(ell, Vec3(2.0, 0.0, 0.0)));
    out.push_back(make_check(kSuite, "outward_normal", "ellipsoid (2,1,1) at (2,0,0)", n[0], 1.0,
                             (n - Vec3(1.0, 0.0, 0.0)).norm(), 1e-12, s));
    const ChartAtlas two = ChartAtlas::sphere(2.0);
    const Vec3 m = geometry::unit_normal(two, at(two, Vec3(2.0, 0.0, 0.0)));
    out.push_back(make_check(kSuite, "outward_normal", "sphere R = 2 at (2,0,0)", m[0], 1.0,
                             (m - Vec3(1.0, 0.0, 0.0)).norm(), 1e-12, s));
  }
  {
    const ScalarField x3([](const Vec3& x) { return x[2]; },
                         [](const Vec3&) { return Vec3(0.0, 0.0, 1.0); });
    const Vec3 g_pole = geometry::surface_gradient(unit, x3, at(unit, Vec3(0.0, 0.0, 1.0)));
    const Vec3 g_eq = geometry::surface_gradient(unit, x3, at(unit, Vec3(1.0, 0.0, 0.0)));
    out.push_back(make_check(kSuite, "surface_gradient", "x3 at the pole", g_pole.norm(), 0.0,
                             g_pole.norm(), 1e-12, s));
    out.push_back(make_check(kSuite, "surface_gradient", "x3 at (1,0,0)", g_eq[2], 1.0,
                             (g_eq - Vec3(0.0, 0.0, 1.0)).norm(), 1e-12, s));
  }
  {
    const VectorField pos([](const Vec3& x) { return x; },
                          [](const Vec3&) { return Mat3::Identity().eval(); });
    const SurfacePoint p = at(unit, random_direction(rng));
    out.push_back(absolute_check(kSuite, "surface_divergence", "position field on unit sphere",
                                 geometry::surface_divergence(unit, pos, p), 2.0, 1e-10, s));
    const ChartAtlas two = ChartAtlas::sphere(2.0);
    const VectorField radial([](const Vec3& x) { return x.normalized(); });
    const SurfacePoint q = at(two, 2.0 * random_direction(rng));
    out.push_back(absolute_check(kSuite, "surface_divergence", "unit normal field, R = 2",
                                 geometry::surface_divergence(two, radial, q), 1.0, 1e-8, s));
  }

  for (const auto& [name, F] : polynomial_fields()) {
    const double r = geometry::check_surface_divergence_theorem(unit, quad, F);
    out.push_back(make_check(kSuite, "surface_divergence_theorem", name, r, 0.0, r, 1e-6, s));
  }
  {
    const ScalarField f([](const Vec3& x) { return x[0] * x[1] + x[2]; },
                        [](const Vec3& x) { return Vec3(x[1], x[0], 1.0); });
    const ScalarField g([](const Vec3& x) { return 1.0 + x[0] * x[2] * x[2]; },
                        [](const Vec3& x) { return Vec3(x[2] * x[2], 0.0, 2.0 * x[0] * x[2]); });
    for (int j = 0; j < 3; ++j) {
      const double r = geometry::integration_by_parts_residual(unit, quad, f, g, j);
      out.push_back(make_check(kSuite, "surface_integration_by_parts",
                               "f = x1 x2 + x3, g = 1 + x1 x3^2, j = " + std::to_string(j + 1), r,
                               0.0, r, 1e-6, s));
    }
  }
  {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double tangential = 0.0;
    double idempotent = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec3 c(u(rng), u(rng), u(rng));
      Mat3 M;
      for (int i = 0; i < 9; ++i) M(i / 3, i % 3) = u(rng);
      const ScalarField f([c, M](const Vec3& x) { return c.dot(x) + x.dot(M * x); },
                          [c, M](const Vec3& x) { return (c + (M + M.transpose()) * x).eval(); });
      const ChartAtlas& atlas = k % 2 == 0 ? unit : ell;
      Vec3 d = random_direction(rng);
      if (k % 2 == 1) d[0] *= 2.0;
      const SurfacePoint p = at(atlas, d);
      const Vec3 g = geometry::surface_gradient(atlas, f, p);
      tangential = std::max(tangential, std::abs(g.dot(geometry::unit_normal(atlas, p))));
      idempotent = std::max(idempotent, (geometry::tangential_projector(atlas, p) * g - g).norm());
    }
    out.push_back(make_check(kSuite, "tangentiality", "100 random quadratic fields",
                             tangential, 0.0, tangential, 1e-10, s));
    out.push_back(make_check(kSuite, "projector_idempotence", "100 random quadratic fields",
                             idempotent, 0.0, idempotent, 1e-12, s));
  }
}

void kinematics_checks(const SuiteContext& ctx, std::vector<Record>& out) {
  using namespace kinematics;
  const double s = ctx.tol_scale;
  const Vec3 xi(0.3, -0.2, 0.5);
  out.push_back(absolute_check(kSuite, "metric_determinant", "identity flow",
                               bulk_sqrt_metric(identity_flow(), xi, 0.7), 1.0, 1e-12, s));
  out.push_back(absolute_check(kSuite, "metric_determinant", "dilation (1 + t) at t = 1",
                               bulk_sqrt_metric(dilation_flow(1.0), xi, 1.0), 8.0, 1e-12, s));
  out.push_back(absolute_check(kSuite, "metric_determinant", "shear at t = 0.8",
                               bulk_sqrt_metric(shear_flow(1.0), xi, 0.8), 1.0, 1e-12, s));

  const geometry::ChartAtlas unit = geometry::ChartAtlas::sphere(1.0);
  const auto squad = geometry::make_quadrature(unit, {24, 24, {}});
  {
    const MovingSurface dil(unit, dilation_flow(1.0));
    const MovingSurface rot(unit, rotation_flow(1.3));
    const SurfacePoint p = squad.nodes[squad.size() / 3];
    out.push_back(absolute_check(kSuite, "surface_area_ratio", "dilating sphere at t = 0.5",
                                 dil.area_ratio(p, 0.5), 2.25, 1e-12, s));
    out.push_back(absolute_check(kSuite, "surface_area_ratio", "rotating sphere at t = 0.9",
                                 rot.area_ratio(p, 0.9), 1.0, 1e-12, s));
  }

  const auto ball = make_ball_quadrature(1.0, 12, {16, 16, {}});
  const SpaceTimeScalar f = [](const Vec3& x, double t) {
    return 1.0 + x[0] * x[0] - 0.5 * x[1] * x[2] + t * x[2];
  };
  const SpaceTimeScalar one = [](const Vec3&, double) { return 1.0; };
  const std::vector<std::pair<std::string, BulkFlowMap>> flows{
      {"dilation", dilation_flow(1.0)}, {"rotation", rotation_flow(1.0)}, {"shear", shear_flow(1.0)}};
  for (const auto& [name, flow] : flows) {
    const double rb = bulk_metric_identity_residual(flow, ball, f, 0.4);
    out.push_back(make_check(kSuite, "metric_time_derivative_identity", "bulk, " + name, rb, 0.0,
                             rb, 1e-7, s));
    const MovingSurface surf(unit, flow);
    const double rs = surface_metric_identity_residual(surf, squad, f, 0.4);
    out.push_back(make_check(kSuite, "metric_time_derivative_identity", "surface, " + name, rs,
                             0.0, rs, 1e-7, s));
  }
  {
    const double rb = bulk_metric_identity_residual(dilation_flow(1.0), ball, one, 0.0);
    out.push_back(make_check(kSuite, "metric_time_derivative_identity",
                             "bulk dilation, f = 1, t = 0", rb, 0.0, rb, 1e-7, s));
  }

  const ScalarField rho0([](const Vec3& x) { return 1.0 + 0.3 * x[0] + 0.2 * x[1] * x[2]; });
  {
    double worst = 0.0;
    for (const auto& [name, flow] : flows) {
      worst = std::max(worst, bulk_continuity_residual(flow, rho0, xi, 0.35));
    }
    out.push_back(make_check(kSuite, "continuity_pullback", "bulk, dilation/rotation/shear",
                             worst, 0.0, worst, 1e-7, s));
    const MovingSurface dil(unit, dilation_flow(1.0));
    const double rs = surface_continuity_residual(dil, rho0, squad.nodes[7], 0.35);
    out.push_back(make_check(kSuite, "continuity_pullback", "surface, dilating sphere", rs, 0.0,
                             rs, 1e-7, s));
    const double ri = bulk_continuity_residual(identity_flow(), rho0, xi, 0.35);
    out.push_back(make_check(kSuite, "continuity_pullback", "bulk, identity", ri, 0.0, ri, 1e-10, s));
  }
  {
    const BulkFlowMap br = breathing_flow(0.2, 3.0, 2.0);
    std::vector<double> res;
    for (double h : {1e-3, 5e-4, 2.5e-4}) {
      res.push_back(bulk_continuity_residual(br, rho0, xi, 0.3, {2, h}));
    }
    const double order = std::min(std::log2(res[0] / res[1]), std::log2(res[1] / res[2]));
    Record r = make_check(kSuite, "continuity_convergence_order",
                          "breathing flow, second-order differences", order, 2.0,
                          std::max(0.0, 2.0 - order), 0.1, s);
    r.extra = {{"residual_h1", res[0]}, {"residual_h2", res[1]}, {"residual_h3", res[2]}};
    out.push_back(r);
  }
  {
    const BulkFlowMap dil = dilation_flow(1.0);
    out.push_back(relative_check(kSuite, "pushforward_integral", "dilating unit ball at t = 1",
                                 pushforward_integral(dil, ball, one, 1.0), 32.0 * kPi / 3.0,
                                 1e-6, s));
    out.push_back(relative_check(kSuite, "pushforward_integral", "dilating unit sphere at t = 1",
                                 pushforward_integral(MovingSurface(unit, dil), squad, one, 1.0),
                                 16.0 * kPi, 1e-6, s));
    const auto hq = geometry::make_quadrature(unit, {24, 24, {0.0}});
    out.push_back(relative_check(
        kSuite, "pushforward_integral", "upper hemisphere of the static sphere",
        pushforward_integral(MovingSurface(unit, identity_flow()), hq, one, 0.0, [](const Vec3& x) {
          return x[2] > 0.0;
        }),
        2.0 * kPi, 1e-6, s));

    CompensatedSum ref;
    for (std::size_t i = 0; i < ball.size(); ++i) ref += ball.weights[i] * rho0(ball.nodes[i]);
    const SpaceTimeScalar rho = [&dil, &rho0](const Vec3& x, double t) {
      const Vec3 y = dil.inverse(x, t);
      return rho0(y) / bulk_sqrt_metric(dil, y, t);
    };
    out.push_back(relative_check(kSuite, "mass_representation", "dilating ball at t = 0.6",
                                 pushforward_integral(dil, ball, rho, 0.6), ref.value(), 1e-12, s));
  }
}

void constitutive_checks(const SuiteContext& ctx, std::vector<Record>& out) {
  using namespace constitutive;
  const double s = ctx.tol_scale;
  out.push_back(absolute_check(kSuite, "total_pressure", "p = rho^2 at rho = 3",
                               total_pressure(BarotropicLaw::quadratic(), 3.0), 9.0, 1e-13, s));
  out.push_back(absolute_check(kSuite, "total_pressure", "linear law",
                               total_pressure(BarotropicLaw::linear(2.5), 1.7), 0.0, 1e-15, s));
  out.push_back(relative_check(kSuite, "total_pressure", "p = rho^1.4 at rho = 2",
                               total_pressure(BarotropicLaw::gamma_law(1.0, 1.4), 2.0),
                               0.4 * std::pow(2.0, 1.4), 1e-13, s));
  std::mt19937_64 rng(ctx.seed + 1);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const std::vector<std::pair<std::string, BarotropicLaw>> laws{
      {"gamma(2, 1.4)", BarotropicLaw::gamma_law(2.0, 1.4)},
      {"gamma(0.3, 2)", BarotropicLaw::gamma_law(0.3, 2.0)},
      {"quadratic(0.5)", BarotropicLaw::quadratic(0.5)},
      {"linear(1.5)", BarotropicLaw::linear(1.5)},
      {"table", BarotropicLaw::table({0.05, 1.0, 3.0, 6.0, 12.0}, {0.01, 1.0, 7.0, 30.0, 150.0})}};
  for (const auto& [name, law] : laws) {
    double identity = 0.0;
    double deriv = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double rho = u(rng);
      identity = std::max(identity, std::abs(total_pressure(law, rho) + law.p(rho) -
                                             rho * law.p_prime(rho)) /
                                        std::max(1.0, std::abs(rho * law.p_prime(rho))));
      const double h = 1e-5 * rho;
      const double fd = central_diff4([&](double r) { return law.p(r); }, rho, h);
      deriv = std::max(deriv, std::abs(fd - law.p_prime(rho)) / std::max(1e-300, std::abs(law.p_prime(rho))));
    }
    out.push_back(make_check(kSuite, "total_pressure_identity", name, identity, 0.0, identity,
                             1e-14, s));
    out.push_back(make_check(kSuite, "law_derivative_consistency", name, deriv, 0.0, deriv, 1e-6, s));
  }
  {
    const BarotropicLaw g = BarotropicLaw::gamma_law(1.7, 1.6);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double rho = u(rng);
      const double closed = 0.6 * 1.7 * std::pow(rho, 1.6);
      worst = std::max(worst, std::abs(total_pressure(g, rho) - closed) / closed);
    }
    out.push_back(make_check(kSuite, "total_pressure", "gamma law closed form", worst, 0.0, worst,
                             1e-12, s));
  }
  out.push_back(absolute_check(kSuite, "represented_internal_energy", "p = rho^2, rho0 = 1, sqrtG = 2",
                               represented_internal_energy(BarotropicLaw::quadratic(), 1.0, 2.0),
                               0.5, 1e-15, s));
  out.push_back(relative_check(
      kSuite, "represented_internal_energy", "p = rho^1.4, rho0 = 1, sqrtG = 8",
      represented_internal_energy(BarotropicLaw::gamma_law(1.0, 1.4), 1.0, 8.0),
      std::pow(8.0, -0.4), 1e-14, s));
  out.push_back(absolute_check(kSuite, "represented_internal_energy", "linear law, rho0 = 0.7",
                               represented_internal_energy(BarotropicLaw::linear(1.0), 0.7, 3.3),
                               0.7, 1e-15, s));
  const EnergyDensity e = energy_density(BarotropicLaw::quadratic(), 2.0, Vec3(1.0, 0.0, 0.0));
  out.push_back(absolute_check(kSuite, "energy_density", "rho = 2, v = e1, p = rho^2 (kinetic)",
                               e.kinetic, 1.0, 1e-15, s));
  out.push_back(absolute_check(kSuite, "energy_density", "rho = 2, v = e1, p = rho^2 (internal)",
                               e.internal, 4.0, 1e-15, s));
}

}  // namespace

std::vector<Record> run_verify(const SuiteContext& ctx) {
  std::vector<Record> out;
  geometry_checks(ctx, out);
  kinematics_checks(ctx, out);
  constitutive_checks(ctx, out);
  return out;
}

}  // namespace varflow::cli
