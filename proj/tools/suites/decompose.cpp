#include <cmath>
#include <random>

#include "suites.hpp"
#include "varflow/helmholtz.hpp"

namespace varflow::cli {

namespace {

using namespace helmholtz;

constexpr const char* kSuite = "decompose";

double max_coefficient_error(const std::vector<double>& got, const std::vector<double>& want) {
  double e = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    e = std::max(e, std::abs(got[i] - (i < want.size() ? want[i] : 0.0)));
  }
  return e;
}

std::vector<double> random_coefficients(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>((degree + 1) * (degree + 1)));
  for (double& x : c) x = u(rng);
  return c;
}

SurfaceField field_of(const SurfacePotential& p) {
  return [p](const geometry::SurfacePoint& q) { return p.field(q.position); };
}

/// Least-squares slope and R^2 of log(y) against log(x).
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]);
    const double b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    syy += b * b;
  }
  const double cxx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double cyy = syy - sy * sy / n;
  return {cxy / cxx, cxy * cxy / (cxx * cyy)};
}

}  // namespace

std::vector<Record> run_decompose(const SuiteContext& ctx) {
  const YAML::Node sec = ctx.config["decompose"];
  const double s = ctx.tol_scale;
  const int trips = get_or(sec, "round_trips", 20);
  const int degree = get_or(sec, "potential_degree", 8);
  const int L = get_or(sec, "max_degree", kDefaultDegree);
  std::mt19937_64 rng(ctx.seed + 2);
  std::vector<Record> out;

  const Sphere unit{Vec3::Zero(), 1.0};
  const Sphere shifted{Vec3(0.1, -0.2, 0.3), 1.5};
  const SphereDecomposer dec_unit(unit, L);
  const SphereDecomposer dec_shift(shifted, L);

  for (int k = 0; k < trips; ++k) {
    const bool odd = k % 2 == 1;
    const SphereDecomposer& dec = odd ? dec_shift : dec_unit;
    const std::vector<double> c = random_coefficients(rng, degree);
    const SurfacePotential pot(odd ? shifted : unit, degree, c);
    const SurfacePotential got = dec.decompose(field_of(pot));
    const double err = max_coefficient_error(got.coefficients(), c);
    Record r = make_check(kSuite, "gradient_normal_round_trip",
                          "random potential " + std::to_string(k + 1) + (odd ? ", R = 1.5 shifted" : ", unit"),
                          err, 0.0, err, 1e-8, s);
    r.extra = {{"residual", got.residual}, {"defect", got.defect}};
    out.push_back(r);
  }

  {
    const SurfacePotential p1(unit, degree, random_coefficients(rng, degree));
    const SurfacePotential p2(unit, degree, random_coefficients(rng, degree));
    const double a = 0.7;
    const double b = -1.9;
    const SurfaceField F = [&](const geometry::SurfacePoint& q) {
      return (a * p1.field(q.position) + b * p2.field(q.position)).eval();
    };
    const auto c = dec_unit.decompose(F).coefficients();
    const auto c1 = dec_unit.decompose(field_of(p1)).coefficients();
    const auto c2 = dec_unit.decompose(field_of(p2)).coefficients();
    double err = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(c[i] - a * c1[i] - b * c2[i]));
    out.push_back(make_check(kSuite, "decomposition_linearity", "0.7 F1 - 1.9 F2", err, 0.0, err,
                             kSpectralTolerance, s));
  }

  {
    const SurfaceField grad_x3 = [](const geometry::SurfacePoint& q) {
      const Vec3 n = q.position.normalized();
      return (Vec3(0.0, 0.0, 1.0) - n[2] * n - 2.0 * q.position[2] * n).eval();
    };
    const double d0 = dec_unit.orthogonality_defect(grad_x3, L);
    out.push_back(make_check(kSuite, "orthogonality_defect", "gradient-plus-normal field of x3",
                             d0, 0.0, d0, 1e-9, s));
    const SurfaceField rot = [](const geometry::SurfacePoint& q) {
      const Vec3 n = q.position.normalized();
      return n.cross(Vec3(0.0, 0.0, 1.0) - n[2] * n).eval();
    };
    const double norm2 = std::pow(dec_unit.l2_norm(rot), 2);
    out.push_back(relative_check(kSuite, "orthogonality_defect", "rotational field n x grad x3",
                                 dec_unit.orthogonality_defect(rot, L), norm2, 1e-8, s));
    const SurfaceField zero = [](const geometry::SurfacePoint&) { return Vec3::Zero().eval(); };
    out.push_back(absolute_check(kSuite, "orthogonality_defect", "zero field",
                                 dec_unit.orthogonality_defect(zero, L), 0.0, 1e-15, s));

    const SurfacePotential base(unit, degree, random_coefficients(rng, degree));
    std::vector<double> eps{1e-4, 1e-3, 1e-2};
    std::vector<double> defects;
    for (double e : eps) {
      const SurfaceField F = [&, e](const geometry::SurfacePoint& q) {
        return (base.field(q.position) + e * dec_unit.divergence_free_field(3, 2, true, q.position)).eval();
      };
      defects.push_back(dec_unit.orthogonality_defect(F, L));
    }
    const auto [slope, r2] = loglog_fit(eps, defects);
    Record r = make_check(kSuite, "defect_detector_slope", "rotational contamination of degree 3",
                          r2, 1.0, 1.0 - r2, 1e-3, s);
    r.extra = {{"slope", slope}, {"defect_1e-4", defects[0]}, {"defect_1e-3", defects[1]},
               {"defect_1e-2", defects[2]}};
    out.push_back(r);
    out.push_back(absolute_check(kSuite, "defect_detector_slope", "log-log slope", slope, 1.0,
                                 0.05, s));
  }

  {
    const SurfacePotential one(unit, 0, {1.0});
    const SurfacePotential got = dec_unit.decompose(field_of(one));
    out.push_back(make_check(kSuite, "gradient_normal_round_trip", "constant potential",
                             got.coefficient(0, 0), 1.0,
                             max_coefficient_error(got.coefficients(), {1.0}), 1e-9, s));
  }

  {
    // Manufactured surface acceleration from a known pressure.
    const SurfacePotential pi(unit, 4, random_coefficients(rng, 4));
    FrozenInterface st;
    st.surface_density = [](const Vec3&) { return 0.5; };
    st.surface_acceleration = [&pi](const Vec3& x) { return (-pi.field(x) / 0.5).eval(); };
    st.pressure_inside = [](const Vec3&) { return 0.0; };
    st.pressure_outside = [](const Vec3&) { return 0.0; };
    const SurfacePotential got = incompressible_surface_pressure(dec_unit, st);
    const double err = max_coefficient_error(got.coefficients(), pi.coefficients());
    out.push_back(make_check(kSuite, "incompressible_surface_pressure",
                             "manufactured acceleration", err, 0.0, err, 1e-8, s));
  }

  {
    // Frozen bubble interface in equilibrium.
    const bubble::SolverConfig cfg = solver_config_from_yaml(ctx.config["simulate"]);
    const bubble::InitialData init = initial_data_from_yaml(ctx.config["simulate"]);
    const bubble::RadialTwoPhaseState st = bubble::initial_state(cfg, init);
    const auto pa = bubble::profile_A(st, cfg);
    const auto pb = bubble::profile_B(st, cfg);
    const double expected = st.R * (pb.pressure.front() - pa.pressure.back()) / 2.0;
    const VectorField still = VectorField::constant(Vec3::Zero());
    const ScalarField rho_S = ScalarField::constant(0.3);
    const bubble::FrozenSurfaceReport rep =
        bubble::frozen_incompressible_residual(st, cfg, still, rho_S, true, 8);
    Record r = absolute_check(kSuite, "frozen_surface_pressure", "interface at rest, R = " +
                              format_number(st.R), rep.mean_pressure, expected, 1e-9, s);
    r.extra = {{"momentum_residual", rep.momentum_residual}, {"defect", rep.orthogonality_defect}};
    out.push_back(r);

    const double omega = 0.8;
    const VectorField spin(
        [omega](const Vec3& x) { return (omega * Vec3(-x[1], x[0], 0.0)).eval(); },
        [omega](const Vec3&) {
          Mat3 J = Mat3::Zero();
          J(0, 1) = -omega;
          J(1, 0) = omega;
          return J;
        });
    const bubble::FrozenSurfaceReport rr =
        bubble::frozen_incompressible_residual(st, cfg, spin, rho_S, false, 8);
    Record d = make_check(kSuite, "frozen_surface_divergence", "rigid rotation",
                          rr.max_surface_divergence, 0.0, rr.max_surface_divergence, 1e-10, s);
    d.extra = {{"momentum_residual", rr.momentum_residual}, {"defect", rr.orthogonality_defect},
               {"mean_pressure", rr.mean_pressure}};
    out.push_back(d);
    out.push_back(make_check(kSuite, "frozen_surface_continuity", "rigid rotation, uniform density",
                             rr.surface_continuity, 0.0, rr.surface_continuity, 1e-12, s));
  }
  return out;
}

}  // namespace varflow::cli
