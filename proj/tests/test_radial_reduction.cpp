// Spherically symmetric fields substituted into the three-dimensional
// operators, compared with the radial forms and with the solver's cell rates.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "varflow/bubble.hpp"
#include "varflow/kinematics.hpp"
#include "varflow/quadrature_rules.hpp"

using namespace varflow;
using namespace varflow::bubble;
using constitutive::BarotropicLaw;
using constitutive::Phase;
using constitutive::total_pressure;

namespace {

struct RadialProfile {
  std::function<double(double)> rho;
  std::function<double(double)> u;
  BarotropicLaw law;
};

// Smooth at the origin: rho even in r, u odd; u vanishes at r = 1 and r = 2.
RadialProfile inner() {
  return {[](double r) { return 1.0 + 0.1 * std::cos(kPi * r); },
          [](double r) { return 0.2 * std::sin(kPi * r); }, BarotropicLaw::gamma_law(1.0, 1.4)};
}

RadialProfile outer() {
  return {[](double r) { return 0.5 + 0.05 * std::cos(kPi * r); },
          [](double r) { return -0.15 * std::sin(kPi * (r - 1.0)); }, BarotropicLaw::quadratic(0.5)};
}

// 3D mass flux rho v and the radial component of div(rho v v) + grad P.
double div3_mass(const RadialProfile& p, const Vec3& x) {
  const auto F = [&](const Vec3& y) -> Vec3 {
    const double r = y.norm();
    return p.rho(r) * p.u(r) * y / r;
  };
  return fd_jacobian(F, x, 1e-4).trace();
}

double div3_momentum_radial(const RadialProfile& p, const Vec3& x) {
  Vec3 div = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    const auto col = [&, j](const Vec3& y) -> Vec3 {
      const double r = y.norm();
      const Vec3 v = p.u(r) * y / r;
      return p.rho(r) * v * v[j];
    };
    const Mat3 J = fd_jacobian(col, x, 1e-4);
    for (int i = 0; i < 3; ++i) div[i] += J(i, j);
  }
  const Vec3 gp = fd_gradient([&](const Vec3& y) { return total_pressure(p.law, p.rho(y.norm())); }, x, 1e-4);
  return (div + gp).dot(x.normalized());
}

double radial_mass(const RadialProfile& p, double r) {
  return central_diff4([&](double s) { return s * s * p.rho(s) * p.u(s); }, r, 1e-4) / (r * r);
}

double radial_momentum(const RadialProfile& p, double r) {
  return central_diff4([&](double s) { return s * s * p.rho(s) * p.u(s) * p.u(s); }, r, 1e-4) / (r * r) +
         central_diff4([&](double s) { return total_pressure(p.law, p.rho(s)); }, r, 1e-4);
}

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

SolverConfig config(int n) {
  SolverConfig c;
  c.law_A = inner().law.with_label(Phase::A);
  c.law_B = outer().law.with_label(Phase::B);
  c.law_S = BarotropicLaw::gamma_law(0.3, 2.0, Phase::S);
  c.nr_A = n;
  c.nr_B = n;
  return c;
}

template <class F>
double cell_integral(double a, double b, F&& f) {
  const Rule1D g = gauss_legendre(6, a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g.weights[k] * f(g.nodes[k]) * 4.0 * kPi * g.nodes[k] * g.nodes[k];
  return s;
}

RadialTwoPhaseState sampled_state(const SolverConfig& c) {
  RadialTwoPhaseState s;
  s.R = 1.0;
  s.surface_mass = 4.0 * kPi * 0.2;
  const auto fill = [](const RadialProfile& p, const std::vector<double>& e, std::vector<double>& m,
                       std::vector<double>& q) {
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      m.push_back(cell_integral(e[i], e[i + 1], p.rho));
      q.push_back(cell_integral(e[i], e[i + 1], [&](double r) { return p.rho(r) * p.u(r); }));
    }
  };
  fill(inner(), edges_A(c, 1.0), s.mass_A, s.momentum_A);
  fill(outer(), edges_B(c, 1.0), s.mass_B, s.momentum_B);
  return s;
}

struct CellErrors {
  double mass = 0.0;
  double momentum = 0.0;
};

// L1 distance between the solver's cell rates and the cell integrals of the
// three-dimensional operators, evaluated along a fixed direction.
CellErrors cell_errors(int n) {
  const SolverConfig c = config(n);
  const StateDerivative d = radial_rhs(sampled_state(c), c);
  const Vec3 dir = Vec3(1.0, 2.0, 2.0) / 3.0;
  CellErrors err;
  const auto accumulate = [&](const RadialProfile& p, const std::vector<double>& e,
                              const std::vector<double>& dm, const std::vector<double>& dq) {
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      err.mass += std::abs(dm[i] + cell_integral(e[i], e[i + 1], [&](double r) { return div3_mass(p, r * dir); }));
      err.momentum += std::abs(
          dq[i] + cell_integral(e[i], e[i + 1], [&](double r) { return div3_momentum_radial(p, r * dir); }));
    }
  };
  accumulate(inner(), edges_A(c, 1.0), d.mass_A, d.momentum_A);
  accumulate(outer(), edges_B(c, 1.0), d.mass_B, d.momentum_B);
  return err;
}

}  // namespace

TEST(RadialReduction, ThreeDimensionalOperatorsMatchRadialForms) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ra(0.1, 0.95);
  std::uniform_real_distribution<double> rb(1.05, 1.95);
  for (int k = 0; k < 20; ++k) {
    const double r1 = ra(rng);
    const double r2 = rb(rng);
    const Vec3 d = random_direction(rng);
    EXPECT_NEAR(div3_mass(inner(), r1 * d), radial_mass(inner(), r1), 1e-8) << "r = " << r1;
    EXPECT_NEAR(div3_mass(outer(), r2 * d), radial_mass(outer(), r2), 1e-8) << "r = " << r2;
    EXPECT_NEAR(div3_momentum_radial(inner(), r1 * d), radial_momentum(inner(), r1), 1e-8) << "r = " << r1;
    EXPECT_NEAR(div3_momentum_radial(outer(), r2 * d), radial_momentum(outer(), r2), 1e-8) << "r = " << r2;
  }
}

TEST(RadialReduction, SolverRatesConvergeToThreeDimensionalOperators) {
  const CellErrors e1 = cell_errors(32);
  const CellErrors e2 = cell_errors(64);
  const CellErrors e3 = cell_errors(128);
  EXPECT_GT(std::log2(e1.mass / e2.mass), 1.5) << e1.mass << " " << e2.mass;
  EXPECT_GT(std::log2(e2.mass / e3.mass), 1.5) << e2.mass << " " << e3.mass;
  EXPECT_GT(std::log2(e1.momentum / e2.momentum), 1.5) << e1.momentum << " " << e2.momentum;
  EXPECT_GT(std::log2(e2.momentum / e3.momentum), 1.5) << e2.momentum << " " << e3.momentum;
}

TEST(RadialReduction, InterfaceBalanceMatchesSurfaceOperators) {
  // rho_S R'' n = -(P_S H n + (P_B - P_A) n) with H from the chart atlas.
  const SolverConfig c = config(32);
  RadialTwoPhaseState s = sampled_state(c);
  s.R = 1.0;
  const StateDerivative d = radial_rhs(s, c);
  const geometry::ChartAtlas sphere = geometry::ChartAtlas::sphere(s.R);
  const double pS = total_pressure(*c.law_S, s.rho_S());
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto p = sphere.locate(s.R * random_direction(rng));
    ASSERT_TRUE(p.has_value());
    const double H = geometry::mean_curvature(sphere, *p);
    const Vec3 n = geometry::unit_normal(sphere, *p);
    const Vec3 force = -(pS * H + d.pressure_B - d.pressure_A) * n;
    EXPECT_NEAR(s.rho_S() * d.Rdot, force.dot(n), 1e-7);
  }
}

TEST(RadialReduction, SurfaceDensityFollowsSurfaceContinuity) {
  // Interface carried by x = (1 + t) xi: rho_S = rho_S0 / area ratio and
  // d rho_S / dt = -rho_S div_Gamma v.
  const kinematics::MovingSurface surf(geometry::ChartAtlas::sphere(1.0), kinematics::dilation_flow(1.0));
  RadialTwoPhaseState s;
  s.surface_mass = 4.0 * kPi * 0.2;
  const auto rho_at = [&](double t) {
    RadialTwoPhaseState q = s;
    q.R = 1.0 + t;
    return q.rho_S();
  };
  for (const auto& p : geometry::make_quadrature(surf.atlas(), {4, 4, {}}).nodes) {
    for (double t : {0.25, 0.7, 1.5}) {
      EXPECT_NEAR(rho_at(t), 0.2 / surf.area_ratio(p, t), 1e-12);
      EXPECT_NEAR(central_diff4(rho_at, t, 1e-3), -rho_at(t) * surf.velocity_surface_divergence(p, t), 1e-7);
    }
  }
}
