#include "varflow/variational.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace varflow::variational {

using constitutive::Phase;
using constitutive::total_pressure;
using geometry::SurfacePoint;
using kinematics::MovingSurface;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (;;) {
    const Vec3 v(nd(rng), nd(rng), nd(rng));
    const double n = v.norm();
    if (n > 1e-3) return v / n;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const Vec3& v) {
  return "(" + fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]) + ")";
}

std::string short_fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

SurfacePoint locate_or_throw(const geometry::ChartAtlas& atlas, const Vec3& x) {
  const auto p = atlas.locate(x);
  if (!p) throw Error("no chart of " + atlas.name() + " covers " + fmt(x));
  return *p;
}

/// x + eps e(t) shape(x) composed with the base map.
BulkFlowMap perturb(const BulkFlowMap& base, const VectorField& shape, const TimeEnvelope& env,
                    double eps) {
  BulkFlowMap m;
  m.name = base.name + "+eps";
  m.position = [=](const Vec3& xi, double t) -> Vec3 {
    const Vec3 x = base(xi, t);
    return x + eps * env(t) * shape(x);
  };
  m.jacobian_fn = [=](const Vec3& xi, double t) -> Mat3 {
    const Vec3 x = base(xi, t);
    return (Mat3::Identity() + eps * env(t) * shape.jacobian(x)) * base.jacobian(xi, t);
  };
  m.time_derivative_fn = [=](const Vec3& xi, double t) -> Vec3 {
    const Vec3 x = base(xi, t);
    const Vec3 v = base.lagrangian_velocity(xi, t);
    return v + eps * (env.derivative(t) * shape(x) + env(t) * (shape.jacobian(x) * v));
  };
  const auto position = m.position;
  const auto jacobian = m.jacobian_fn;
  m.inverse = [=](const Vec3& x, double t) -> Vec3 {
    Vec3 xi = base.inverse ? base.inverse(x, t) : x;
    for (int it = 0; it < 60; ++it) {
      const Vec3 r = position(xi, t) - x;
      if (r.norm() <= 4.0 * kEps * std::max(1.0, x.norm())) break;
      xi -= jacobian(xi, t).lu().solve(r);
    }
    return xi;
  };
  return m;
}

double divergence(const VectorField& z, const Vec3& x) { return z.jacobian(x).trace(); }

double surface_divergence_at(const VectorField& z, const Vec3& x, const Vec3& n) {
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  return P.cwiseProduct(z.jacobian(x)).sum();
}

struct MetricData {
  double sqrt_g = 0.0;
  Vec2 d_sqrt_g = Vec2::Zero();  // parameter derivatives of sqrt(G)
  Mat2 g_inv = Mat2::Zero();
};

MetricData metric_data(const geometry::ChartJet& j) {
  MetricData m;
  const Mat2 g = j.d.transpose() * j.d;
  const double G = g.determinant();
  if (!(G > 0.0)) throw SingularMetricError("surface metric determinant is not positive");
  m.sqrt_g = std::sqrt(G);
  m.g_inv = g.inverse();
  const Vec3 second[2][2] = {{j.d11, j.d12}, {j.d12, j.d22}};
  for (int c = 0; c < 2; ++c) {
    double tr = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double dg = second[a][c].dot(j.d.col(b)) + j.d.col(a).dot(second[b][c]);
        tr += m.g_inv(a, b) * dg;
      }
    }
    m.d_sqrt_g[c] = 0.5 * m.sqrt_g * tr;
  }
  return m;
}

const BarotropicLaw& surface_law(const MultiphaseConfiguration& config) {
  if (!config.S.law) {
    throw ConfigError("configuration '" + config.name + "' has no surface law");
  }
  return *config.S.law;
}

double tension(const MultiphaseConfiguration& config) {
  if (!config.S.tension) {
    throw ConfigError("configuration '" + config.name + "' has no constant tension");
  }
  return config.S.tension->p0;
}

/// Pressure of a bulk phase at the image of xi, through its own pullback.
double one_sided_pressure(const BulkPhase& ph, const Vec3& xi, double t) {
  const double rho = ph.rho0(xi) / kinematics::bulk_sqrt_metric(ph.flow, xi, t);
  ph.law.check(rho);
  return total_pressure(ph.law, rho);
}

template <class F>
void for_time_nodes(const Rule1D& time, F&& f) {
  for (std::size_t k = 0; k < time.size(); ++k) f(time.nodes[k], time.weights[k]);
}

void append(kinematics::VolumeQuadrature& dst, const kinematics::VolumeQuadrature& src) {
  dst.nodes.insert(dst.nodes.end(), src.nodes.begin(), src.nodes.end());
  dst.weights.insert(dst.weights.end(), src.weights.begin(), src.weights.end());
}

const VectorField& shape_of(const VariationField& v, Phase phase) {
  switch (phase) {
    case Phase::A:
      return v.z_A;
    case Phase::B:
      return v.z_B;
    case Phase::S:
      break;
  }
  return v.z_S;
}

}  // namespace

// -- configuration and variation checks ---------------------------------------

void MultiphaseConfiguration::validate(int probes, std::uint64_t seed, double tol) const {
  if (!(interface_radius > 0.0 && outer_radius > interface_radius)) {
    throw ConfigError("need 0 < interface_radius < outer_radius");
  }
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  const MovingSurface surface(geometry::ChartAtlas::sphere(interface_radius), S.flow);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, horizon);
  for (int i = 0; i < probes; ++i) {
    const Vec3 u = random_direction(rng);
    const double t = ut(rng);
    const Vec3 xi = interface_radius * u;
    const Vec3 xs = S.flow(xi, t);
    const double scale = std::max(1.0, xs.norm());
    for (const auto& [label, ph] : {std::pair{"A", &A}, std::pair{"B", &B}}) {
      const double gap = (ph->flow(xi, t) - xs).norm();
      if (gap > tol * scale) {
        throw ConstraintError(std::string("interface compatibility violated: phase ") + label +
                              " map differs from the surface map by " + fmt(gap) + " at xi = " +
                              fmt(xi) + ", t = " + fmt(t));
      }
    }
    const Vec3 n = surface.normal(locate_or_throw(surface.atlas(), xi), t);
    const double vs = S.flow.lagrangian_velocity(xi, t).dot(n);
    const double va = A.flow.lagrangian_velocity(xi, t).dot(n);
    const double vb = B.flow.lagrangian_velocity(xi, t).dot(n);
    const double vscale = std::max({1.0, std::abs(vs), std::abs(va), std::abs(vb)});
    if (std::abs(va - vs) > tol * vscale || std::abs(vb - vs) > tol * vscale) {
      throw ConstraintError("normal velocity matching on the interface violated: v_A.n = " +
                            fmt(va) + ", v_B.n = " + fmt(vb) + ", v_S.n = " + fmt(vs) +
                            " at xi = " + fmt(xi) + ", t = " + fmt(t));
    }
    const Vec3 xo = outer_radius * random_direction(rng);
    const Vec3 x = B.flow(xo, t);
    const double off = std::abs(x.norm() - outer_radius);
    const double vn = B.flow.lagrangian_velocity(xo, t).dot(x.normalized());
    if (off > tol * outer_radius || std::abs(vn) > tol * vscale) {
      throw ConstraintError("no-penetration on the outer boundary violated: v_B.n = " + fmt(vn) +
                            ", radial offset " + fmt(off) + " at xi = " + fmt(xo) +
                            ", t = " + fmt(t));
    }
  }
}

double TimeEnvelope::operator()(double t) const {
  const double s = t / cutoff();
  if (!(s > 0.0 && s < 1.0)) return 0.0;
  return std::exp(4.0 - 1.0 / (s * (1.0 - s)));
}

double TimeEnvelope::derivative(double t) const {
  const double s = t / cutoff();
  if (!(s > 0.0 && s < 1.0)) return 0.0;
  const double q = s * (1.0 - s);
  return std::exp(4.0 - 1.0 / q) * (1.0 - 2.0 * s) / (q * q) / cutoff();
}

void VariationField::validate(const MultiphaseConfiguration& config, int probes,
                              std::uint64_t seed, double tol) const {
  if (!terminal_zero) {
    throw ConstraintError("terminal condition violated: variation '" + name +
                          "' is not declared to vanish at the horizon");
  }
  if (std::abs(envelope.horizon - config.horizon) > 1e-14 * config.horizon ||
      !(envelope.fraction > 0.0 && envelope.fraction < 1.0)) {
    throw ConstraintError("terminal condition violated: envelope of '" + name +
                          "' does not vanish on the tail of the configuration horizon");
  }
  if (envelope(0.0) != 0.0 || envelope(config.horizon) != 0.0) {
    throw ConstraintError("initial/terminal condition violated: envelope is nonzero at an end");
  }
  const MovingSurface surface(geometry::ChartAtlas::sphere(config.interface_radius),
                              config.S.flow);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, envelope.cutoff());
  for (int i = 0; i < probes; ++i) {
    const Vec3 xi = config.interface_radius * random_direction(rng);
    const double t = ut(rng);
    const Vec3 x = config.S.flow(xi, t);
    const Vec3 n = surface.normal(locate_or_throw(surface.atlas(), xi), t);
    const Vec3 za = z_A(x);
    const Vec3 zb = z_B(x);
    const Vec3 zs = z_S(x);
    const double scale = std::max({1.0, za.norm(), zb.norm(), zs.norm()});
    const double ga = std::abs(za.dot(n) - zs.dot(n));
    const double gb = std::abs(zb.dot(n) - zs.dot(n));
    if (ga > tol * scale || gb > tol * scale) {
      throw ConstraintError("normal matching on the interface violated by '" + name +
                            "': z_A.n = " + fmt(za.dot(n)) + ", z_B.n = " + fmt(zb.dot(n)) +
                            ", z_S.n = " + fmt(zs.dot(n)) + " at x = " + fmt(x) +
                            ", t = " + fmt(t));
    }
    if (surface_divergence_free) {
      const double d = surface_divergence_at(z_S, x, n);
      if (std::abs(d) > tol * scale) {
        throw ConstraintError("surface incompressibility violated by '" + name +
                              "': div_Gamma z_S = " + fmt(d) + " at x = " + fmt(x));
      }
    }
    const Vec3 xo = config.B.flow(config.outer_radius * random_direction(rng), t);
    const double zn = z_B(xo).dot(xo.normalized());
    if (std::abs(zn) > tol * std::max(1.0, z_B(xo).norm())) {
      throw ConstraintError("tangency on the outer boundary violated by '" + name +
                            "': z_B.n = " + fmt(zn) + " at x = " + fmt(xo));
    }
  }
}

std::string action_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::CompressibleSurface:
      return "compressible-surface";
    case ActionKind::IncompressibleSurface:
      return "incompressible-surface";
    case ActionKind::ConstantTension:
      return "constant-tension";
  }
  return "unknown";
}

Discretization Discretization::coarse() {
  Discretization d;
  d.time_nodes = 12;
  d.radial_per_panel = 4;
  d.directions = {8, 8, {}};
  d.surface = {12, 12, {}};
  return d;
}

double ActionValue::magnitude() const {
  return std::abs(kinetic_A) + std::abs(internal_A) + std::abs(kinetic_B) + std::abs(internal_B) +
         std::abs(kinetic_S) + std::abs(internal_S);
}

ReferenceQuadrature ReferenceQuadrature::build(const MultiphaseConfiguration& config,
                                               const Discretization& disc) {
  ReferenceQuadrature q;
  const TimeEnvelope env{config.horizon};
  const Rule1D head = gauss_legendre(disc.time_nodes, 0.0, env.cutoff());
  const Rule1D tail = gauss_legendre(std::max(2, disc.time_nodes / 4), env.cutoff(), config.horizon);
  q.time = head;
  q.time.nodes.insert(q.time.nodes.end(), tail.nodes.begin(), tail.nodes.end());
  q.time.weights.insert(q.time.weights.end(), tail.weights.begin(), tail.weights.end());

  const double R0 = config.interface_radius;
  const double R1 = config.outer_radius;
  for (std::size_t i = 0; i + 1 < disc.breaks_A.size(); ++i) {
    append(q.bulk_A, kinematics::make_shell_quadrature(R0 * disc.breaks_A[i], R0 * disc.breaks_A[i + 1],
                                                       disc.radial_per_panel, disc.directions));
  }
  for (std::size_t i = 0; i + 1 < disc.breaks_B.size(); ++i) {
    append(q.bulk_B, kinematics::make_shell_quadrature(R0 + (R1 - R0) * disc.breaks_B[i],
                                                       R0 + (R1 - R0) * disc.breaks_B[i + 1],
                                                       disc.radial_per_panel, disc.directions));
  }
  q.interface_atlas = geometry::ChartAtlas::sphere(R0);
  q.interface = geometry::make_quadrature(q.interface_atlas, disc.surface);
  q.outer_atlas = geometry::ChartAtlas::sphere(R1);
  q.outer = geometry::make_quadrature(q.outer_atlas, disc.surface);
  for (const SurfacePoint& p : q.interface.nodes) {
    const geometry::ChartJet j = q.interface_atlas.jet(p);
    q.interface_tangents.push_back(j.d);
    q.interface_area0.push_back(j.d.col(0).cross(j.d.col(1)).norm());
  }
  return q;
}

// -- action -------------------------------------------------------------------

namespace {

struct BulkSums {
  CompensatedSum kinetic;
  CompensatedSum internal;
};

void accumulate_bulk(const BulkPhase& ph, const kinematics::VolumeQuadrature& q, double t,
                     double wt, BulkSums& sums) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec3& xi = q.nodes[i];
    const double w = wt * q.weights[i];
    const double rho0 = ph.rho0(xi);
    const Vec3 v = ph.flow.lagrangian_velocity(xi, t);
    const double sg = kinematics::bulk_sqrt_metric(ph.flow, xi, t);
    ph.law.check(rho0 / sg);
    sums.kinetic += w * 0.5 * rho0 * v.squaredNorm();
    sums.internal += w * constitutive::represented_internal_energy(ph.law, rho0, sg);
  }
}

double area_ratio_at(const ReferenceQuadrature& q, const BulkFlowMap& flow, std::size_t i,
                     double t) {
  const Mat32 d = flow.jacobian(q.interface.nodes[i].position, t) * q.interface_tangents[i];
  const double sg = d.col(0).cross(d.col(1)).norm();
  if (!(sg > 0.0)) throw SingularMetricError("surface metric determinant is not positive");
  return sg / q.interface_area0[i];
}

}  // namespace

ActionValue action(const MultiphaseConfiguration& config, ActionKind kind,
                   const ReferenceQuadrature& quad) {
  BulkSums a;
  BulkSums b;
  CompensatedSum kin_s;
  CompensatedSum int_s;
  const BarotropicLaw* law_s =
      kind == ActionKind::CompressibleSurface ? &surface_law(config) : nullptr;
  const double p0 = kind == ActionKind::ConstantTension ? tension(config) : 0.0;
  for_time_nodes(quad.time, [&](double t, double wt) {
    accumulate_bulk(config.A, quad.bulk_A, t, wt, a);
    accumulate_bulk(config.B, quad.bulk_B, t, wt, b);
    for (std::size_t i = 0; i < quad.interface.size(); ++i) {
      const Vec3& xi = quad.interface.nodes[i].position;
      const double w = wt * quad.interface.weights[i];
      if (kind != ActionKind::ConstantTension) {
        kin_s += w * 0.5 * config.S.rho0(xi) *
                 config.S.flow.lagrangian_velocity(xi, t).squaredNorm();
      }
      if (kind == ActionKind::IncompressibleSurface) continue;
      const double J = area_ratio_at(quad, config.S.flow, i, t);
      if (law_s) {
        const double rho0 = config.S.rho0(xi);
        law_s->check(rho0 / J);
        int_s += w * constitutive::represented_internal_energy(*law_s, rho0, J);
      } else {
        int_s += w * (-0.5 * p0) * J;
      }
    }
  });
  ActionValue v;
  v.kinetic_A = a.kinetic.value();
  v.internal_A = a.internal.value();
  v.kinetic_B = b.kinetic.value();
  v.internal_B = b.internal.value();
  v.kinetic_S = kin_s.value();
  v.internal_S = int_s.value();
  v.value = (v.kinetic_A + v.kinetic_B + v.kinetic_S) - (v.internal_A + v.internal_B + v.internal_S);
  return v;
}

ActionValue action(const MultiphaseConfiguration& config, ActionKind kind,
                   const Discretization& disc) {
  return action(config, kind, ReferenceQuadrature::build(config, disc));
}

MultiphaseConfiguration perturbed_config(const MultiphaseConfiguration& config,
                                         const VariationField& variation, double eps) {
  if (eps == 0.0) return config;
  // Probe the perturbed metrics before handing the maps out.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  const TimeEnvelope& env = variation.envelope;
  for (int i = 0; i < 64; ++i) {
    const Vec3 x = config.outer_radius * std::cbrt(ur(rng)) * random_direction(rng);
    const double t = env.cutoff() * ur(rng);
    for (const VectorField* z : {&variation.z_A, &variation.z_B, &variation.z_S}) {
      const double det = (Mat3::Identity() + eps * env(t) * z->jacobian(x)).determinant();
      if (!(det > 0.0)) {
        throw SingularMetricError("perturbed metric is not positive at eps = " + fmt(eps) +
                                  ", x = " + fmt(x) + ", t = " + fmt(t));
      }
    }
  }
  MultiphaseConfiguration c = config;
  c.A.flow = perturb(config.A.flow, variation.z_A, env, eps);
  c.B.flow = perturb(config.B.flow, variation.z_B, env, eps);
  c.S.flow = perturb(config.S.flow, variation.z_S, env, eps);
  return c;
}

Vec3 induced_reference_variation(const MultiphaseConfiguration& config,
                                 const VariationField& variation, Phase phase, const Vec3& xi,
                                 double t) {
  const BulkFlowMap& flow =
      phase == Phase::A ? config.A.flow : (phase == Phase::B ? config.B.flow : config.S.flow);
  return variation.value(shape_of(variation, phase), flow(xi, t), t);
}

// -- finite differences ---------------------------------------------------------

namespace {

FdDerivative richardson_from_values(const std::vector<double>& ladder,
                                    const std::vector<double>& plus,
                                    const std::vector<double>& minus, double magnitude) {
  const std::size_t n = ladder.size();
  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> E(n, std::vector<double>(n, 0.0));
  const double delta = 16.0 * kEps * std::max(magnitude, 1e-300);
  FdDerivative out;
  for (std::size_t i = 0; i < n; ++i) {
    T[i][0] = (plus[i] - minus[i]) / (2.0 * ladder[i]);
    E[i][0] = delta / ladder[i];
    out.central_differences.push_back(T[i][0]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double f = std::pow(4.0, static_cast<double>(k));
    for (std::size_t i = k; i < n; ++i) {
      T[i][k] = (f * T[i][k - 1] - T[i - 1][k - 1]) / (f - 1.0);
      E[i][k] = (f * E[i][k - 1] + E[i - 1][k - 1]) / (f - 1.0);
    }
  }
  out.derivative = T[n - 1][n - 1];
  const double truncation = n >= 2 ? std::abs(T[n - 1][n - 1] - T[n - 1][n - 2]) : 0.0;
  out.richardson_error = truncation + E[n - 1][n - 1];
  return out;
}

void check_ladder(const std::vector<double>& ladder) {
  if (ladder.empty()) throw Error("eps ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw Error("eps ladder entries must be positive");
    if (i > 0 && std::abs(ladder[i - 1] / ladder[i] - 2.0) > 1e-12) {
      throw Error("eps ladder must halve at each rung");
    }
  }
}

/// Evaluates f at +-eps for every rung concurrently, then extrapolates.
FdDerivative parallel_richardson(const std::function<double(double)>& f,
                                 const std::vector<double>& ladder, double magnitude) {
  check_ladder(ladder);
  std::vector<std::future<double>> jobs;
  for (double h : ladder) {
    jobs.push_back(std::async(std::launch::async, f, h));
    jobs.push_back(std::async(std::launch::async, f, -h));
  }
  std::vector<double> plus;
  std::vector<double> minus;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    plus.push_back(jobs[2 * i].get());
    minus.push_back(jobs[2 * i + 1].get());
  }
  return richardson_from_values(ladder, plus, minus, magnitude);
}

std::vector<double> scaled(const std::vector<double>& ladder, double factor) {
  std::vector<double> out;
  for (double h : ladder) out.push_back(factor * h);
  return out;
}

}  // namespace

FdDerivative richardson_derivative(const std::function<double(double)>& f,
                                   const std::vector<double>& ladder, double magnitude) {
  check_ladder(ladder);
  std::vector<double> plus;
  std::vector<double> minus;
  for (double h : ladder) {
    plus.push_back(f(h));
    minus.push_back(f(-h));
  }
  return richardson_from_values(ladder, plus, minus, magnitude);
}

FdDerivative action_derivative_fd(const MultiphaseConfiguration& config,
                                  const VariationField& variation, ActionKind kind,
                                  const std::vector<double>& ladder,
                                  const ReferenceQuadrature& quad) {
  const double magnitude = action(config, kind, quad).magnitude();
  return parallel_richardson(
      [&](double eps) { return action(perturbed_config(config, variation, eps), kind, quad).value; },
      ladder, magnitude);
}

// -- pointwise states -------------------------------------------------------------

BulkPointState bulk_point_state(const BulkPhase& phase, const Vec3& xi, double t) {
  BulkPointState s;
  const Mat3 J = phase.flow.jacobian(xi, t);
  const double det = J.determinant();
  if (!(std::abs(det) > 1e-14)) throw SingularMetricError("bulk metric determinant vanishes");
  s.sqrt_g = std::abs(det);
  s.x = phase.flow(xi, t);
  const std::array<Mat3, 3> H = phase.flow.hessian(xi, t);
  const Mat3 Jinv = J.inverse();
  Vec3 grad_sg;
  for (int j = 0; j < 3; ++j) {
    Mat3 dJ;
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) dJ(k, i) = H[static_cast<std::size_t>(k)](i, j);
    }
    grad_sg[j] = s.sqrt_g * (Jinv * dJ).trace();
  }
  const double rho0 = phase.rho0(xi);
  s.rho = rho0 / s.sqrt_g;
  phase.law.check(s.rho);
  const Vec3 grad_xi_rho = (phase.rho0.gradient(xi) - s.rho * grad_sg) / s.sqrt_g;
  const Vec3 grad_rho = Jinv.transpose() * grad_xi_rho;
  s.pressure = total_pressure(phase.law, s.rho);
  s.grad_pressure = s.rho * phase.law.p_second(s.rho) * grad_rho;
  s.acceleration = phase.flow.lagrangian_acceleration(xi, t);
  return s;
}

SurfacePointState surface_point_state(const MovingSurface& surface, const ScalarField& rho0,
                                      const SurfacePoint& p, double t) {
  SurfacePointState s;
  const geometry::ChartJet j0 = surface.atlas().jet(p);
  const geometry::ChartJet jt = surface.jet(p, t);
  const MetricData m0 = metric_data(j0);
  const MetricData mt = metric_data(jt);
  s.area_ratio = mt.sqrt_g / m0.sqrt_g;
  const Vec2 dJ = (mt.d_sqrt_g - s.area_ratio * m0.d_sqrt_g) / m0.sqrt_g;
  const Vec3 g0 = rho0.gradient(j0.x);
  const Vec2 drho0(g0.dot(j0.d.col(0)), g0.dot(j0.d.col(1)));
  s.rho = rho0(j0.x) / s.area_ratio;
  const Vec2 drho = (drho0 - s.rho * dJ) / s.area_ratio;
  s.grad_rho = jt.d * (mt.g_inv * drho);
  const geometry::LocalFrame f = geometry::local_frame(jt, surface.interior_point(t), true);
  s.x = jt.x;
  s.normal = f.normal;
  s.mean_curvature = f.mean_curvature;
  s.acceleration = surface.flow().lagrangian_acceleration(j0.x, t);
  return s;
}

// -- first variation --------------------------------------------------------------

namespace {

double bulk_pairing(const BulkPhase& ph, const VectorField& z, const TimeEnvelope& env,
                    const Rule1D& time, const kinematics::VolumeQuadrature& q) {
  CompensatedSum sum;
  for_time_nodes(time, [&](double t, double wt) {
    const double e = env(t);
    if (e == 0.0) return;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const BulkPointState st = bulk_point_state(ph, q.nodes[i], t);
      const Vec3 force = ph.rho0(q.nodes[i]) * st.acceleration + st.sqrt_g * st.grad_pressure;
      sum += wt * q.weights[i] * e * force.dot(z(st.x));
    }
  });
  return -sum.value();
}

/// int P n . z over the transported surface, P from the one-sided pullback of ph.
double boundary_pairing(const BulkPhase& ph, const VectorField& z, const TimeEnvelope& env,
                        const Rule1D& time, const geometry::ChartAtlas& atlas,
                        const geometry::SurfaceQuadrature& q) {
  const MovingSurface surf(atlas, ph.flow);
  CompensatedSum sum;
  for_time_nodes(time, [&](double t, double wt) {
    const double e = env(t);
    if (e == 0.0) return;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const SurfacePoint& p = q.nodes[i];
      const double P = one_sided_pressure(ph, p.position, t);
      const Vec3 x = ph.flow(p.position, t);
      sum += wt * q.weights[i] * surf.area_ratio(p, t) * e * P * surf.normal(p, t).dot(z(x));
    }
  });
  return sum.value();
}

}  // namespace

FirstVariationTerms first_variation_rhs(const MultiphaseConfiguration& config,
                                        const VariationField& variation, ActionKind kind,
                                        const ReferenceQuadrature& quad) {
  FirstVariationTerms r;
  const TimeEnvelope& env = variation.envelope;
  r.bulk_A = bulk_pairing(config.A, variation.z_A, env, quad.time, quad.bulk_A);
  r.bulk_B = bulk_pairing(config.B, variation.z_B, env, quad.time, quad.bulk_B);
  r.interface_A = boundary_pairing(config.A, variation.z_A, env, quad.time, quad.interface_atlas,
                                   quad.interface);
  r.interface_B = -boundary_pairing(config.B, variation.z_B, env, quad.time,
                                    quad.interface_atlas, quad.interface);
  r.outer_boundary = boundary_pairing(config.B, variation.z_B, env, quad.time, quad.outer_atlas,
                                      quad.outer);

  const MovingSurface surf(quad.interface_atlas, config.S.flow);
  const BarotropicLaw* law_s =
      kind == ActionKind::CompressibleSurface ? &surface_law(config) : nullptr;
  const double p0 = kind == ActionKind::ConstantTension ? tension(config) : 0.0;
  CompensatedSum surface_sum;
  CompensatedSum combined;
  for_time_nodes(quad.time, [&](double t, double wt) {
    const double e = env(t);
    if (e == 0.0) return;
    for (std::size_t i = 0; i < quad.interface.size(); ++i) {
      const SurfacePoint& p = quad.interface.nodes[i];
      const double w = wt * quad.interface.weights[i] * e;
      Vec3 force;
      double J;
      Vec3 x;
      Vec3 n;
      if (kind == ActionKind::ConstantTension) {
        const geometry::LocalFrame f = surf.frame(p, t, true);
        J = surf.area_ratio(p, t);
        x = surf.position(p, t);
        n = f.normal;
        force = 0.5 * p0 * f.mean_curvature * n;
      } else {
        const SurfacePointState st = surface_point_state(surf, config.S.rho0, p, t);
        J = st.area_ratio;
        x = st.x;
        n = st.normal;
        force = st.rho * st.acceleration;
        if (law_s) {
          law_s->check(st.rho);
          const double P = total_pressure(*law_s, st.rho);
          force += st.rho * law_s->p_second(st.rho) * st.grad_rho + P * st.mean_curvature * n;
        }
      }
      const Vec3 zs = variation.z_S(x);
      surface_sum += w * J * force.dot(zs);
      const double jump =
          one_sided_pressure(config.A, p.position, t) - one_sided_pressure(config.B, p.position, t);
      combined += w * J * jump * n.dot(zs);
    }
  });
  r.surface = -surface_sum.value();
  r.interface_combined = combined.value();
  return r;
}

// -- single energy parts ------------------------------------------------------------

std::string energy_part_name(EnergyPart part) {
  switch (part) {
    case EnergyPart::KineticA:
      return "kinetic_A";
    case EnergyPart::KineticB:
      return "kinetic_B";
    case EnergyPart::KineticS:
      return "kinetic_S";
    case EnergyPart::InternalA:
      return "internal_A";
    case EnergyPart::InternalB:
      return "internal_B";
    case EnergyPart::InternalS:
      return "internal_S";
    case EnergyPart::Tension:
      return "tension";
  }
  return "unknown";
}

namespace {

bool is_kinetic(EnergyPart part) {
  return part == EnergyPart::KineticA || part == EnergyPart::KineticB ||
         part == EnergyPart::KineticS;
}

const BulkPhase& bulk_of(const MultiphaseConfiguration& c, EnergyPart part) {
  return (part == EnergyPart::KineticA || part == EnergyPart::InternalA) ? c.A : c.B;
}

const kinematics::VolumeQuadrature& bulk_quad_of(const ReferenceQuadrature& q, EnergyPart part) {
  return (part == EnergyPart::KineticA || part == EnergyPart::InternalA) ? q.bulk_A : q.bulk_B;
}

const VectorField& bulk_shape_of(const VariationField& v, EnergyPart part) {
  return (part == EnergyPart::KineticA || part == EnergyPart::InternalA) ? v.z_A : v.z_B;
}

}  // namespace

double energy_part(const MultiphaseConfiguration& config, EnergyPart part,
                   const ReferenceQuadrature& quad, double t) {
  CompensatedSum sum;
  switch (part) {
    case EnergyPart::KineticA:
    case EnergyPart::KineticB: {
      const BulkPhase& ph = bulk_of(config, part);
      const auto& q = bulk_quad_of(quad, part);
      for_time_nodes(quad.time, [&](double s, double wt) {
        for (std::size_t i = 0; i < q.size(); ++i) {
          sum += wt * q.weights[i] * 0.5 * ph.rho0(q.nodes[i]) *
                 ph.flow.lagrangian_velocity(q.nodes[i], s).squaredNorm();
        }
      });
      break;
    }
    case EnergyPart::KineticS:
      for_time_nodes(quad.time, [&](double s, double wt) {
        for (std::size_t i = 0; i < quad.interface.size(); ++i) {
          const Vec3& xi = quad.interface.nodes[i].position;
          sum += wt * quad.interface.weights[i] * 0.5 * config.S.rho0(xi) *
                 config.S.flow.lagrangian_velocity(xi, s).squaredNorm();
        }
      });
      break;
    case EnergyPart::InternalA:
    case EnergyPart::InternalB: {
      const BulkPhase& ph = bulk_of(config, part);
      const auto& q = bulk_quad_of(quad, part);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double sg = kinematics::bulk_sqrt_metric(ph.flow, q.nodes[i], t);
        sum += q.weights[i] * constitutive::represented_internal_energy(ph.law, ph.rho0(q.nodes[i]), sg);
      }
      break;
    }
    case EnergyPart::InternalS: {
      const BarotropicLaw& law = surface_law(config);
      for (std::size_t i = 0; i < quad.interface.size(); ++i) {
        const double J = area_ratio_at(quad, config.S.flow, i, t);
        sum += quad.interface.weights[i] *
               constitutive::represented_internal_energy(
                   law, config.S.rho0(quad.interface.nodes[i].position), J);
      }
      break;
    }
    case EnergyPart::Tension: {
      const double p0 = tension(config);
      for (std::size_t i = 0; i < quad.interface.size(); ++i) {
        sum += quad.interface.weights[i] * 0.5 * p0 * area_ratio_at(quad, config.S.flow, i, t);
      }
      break;
    }
  }
  return sum.value();
}

double energy_part_variation(const MultiphaseConfiguration& config,
                             const VariationField& variation, EnergyPart part,
                             const ReferenceQuadrature& quad, double t) {
  const TimeEnvelope& env = variation.envelope;
  CompensatedSum sum;
  switch (part) {
    case EnergyPart::KineticA:
    case EnergyPart::KineticB: {
      const BulkPhase& ph = bulk_of(config, part);
      const auto& q = bulk_quad_of(quad, part);
      const VectorField& z = bulk_shape_of(variation, part);
      for_time_nodes(quad.time, [&](double s, double wt) {
        const double e = env(s);
        if (e == 0.0) return;
        for (std::size_t i = 0; i < q.size(); ++i) {
          const Vec3& xi = q.nodes[i];
          sum += wt * q.weights[i] * e * ph.rho0(xi) *
                 ph.flow.lagrangian_acceleration(xi, s).dot(z(ph.flow(xi, s)));
        }
      });
      return -sum.value();
    }
    case EnergyPart::KineticS:
      for_time_nodes(quad.time, [&](double s, double wt) {
        const double e = env(s);
        if (e == 0.0) return;
        for (std::size_t i = 0; i < quad.interface.size(); ++i) {
          const Vec3& xi = quad.interface.nodes[i].position;
          sum += wt * quad.interface.weights[i] * e * config.S.rho0(xi) *
                 config.S.flow.lagrangian_acceleration(xi, s).dot(
                     variation.z_S(config.S.flow(xi, s)));
        }
      });
      return -sum.value();
    case EnergyPart::InternalA:
    case EnergyPart::InternalB: {
      const BulkPhase& ph = bulk_of(config, part);
      const auto& q = bulk_quad_of(quad, part);
      const VectorField& z = bulk_shape_of(variation, part);
      const double e = env(t);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec3& xi = q.nodes[i];
        const double sg = kinematics::bulk_sqrt_metric(ph.flow, xi, t);
        const double rho = ph.rho0(xi) / sg;
        sum += q.weights[i] * sg * e * (-total_pressure(ph.law, rho)) *
               divergence(z, ph.flow(xi, t));
      }
      return sum.value();
    }
    case EnergyPart::InternalS:
    case EnergyPart::Tension: {
      const MovingSurface surf(quad.interface_atlas, config.S.flow);
      const double e = env(t);
      const double p0 = part == EnergyPart::Tension ? tension(config) : 0.0;
      const BarotropicLaw* law = part == EnergyPart::InternalS ? &surface_law(config) : nullptr;
      for (std::size_t i = 0; i < quad.interface.size(); ++i) {
        const SurfacePoint& p = quad.interface.nodes[i];
        const double J = surf.area_ratio(p, t);
        const double div =
            surface_divergence_at(variation.z_S, surf.position(p, t), surf.normal(p, t));
        const double density =
            law ? -total_pressure(*law, config.S.rho0(p.position) / J) : 0.5 * p0;
        sum += quad.interface.weights[i] * J * e * density * div;
      }
      return sum.value();
    }
  }
  return 0.0;
}

// -- identity checks --------------------------------------------------------------

namespace {

void finish(IdentityCheck& c, double fd_f, double rhs_f, double rich_f, double fd_c_same,
            double fd_c, double rhs_c) {
  c.dA_fd = fd_f;
  c.rhs = rhs_f;
  c.richardson_error = rich_f;
  c.quadrature_delta = std::abs(rhs_f - rhs_c) + std::abs(fd_f - fd_c_same);
  c.mismatch = std::abs(fd_f - rhs_f);
  c.coarse_mismatch = std::abs(fd_c - rhs_c);
  c.tolerance = c.richardson_error + c.quadrature_delta;
  c.within_tolerance = c.mismatch <= c.tolerance;
  c.refines = c.mismatch <= c.coarse_mismatch || c.coarse_mismatch <= c.richardson_error;
  c.pass = c.within_tolerance && c.refines;
}

}  // namespace

IdentityCheck check_first_variation(const MultiphaseConfiguration& config,
                                    const VariationField& variation, ActionKind kind,
                                    const Discretization& fine, const Discretization& coarse) {
  const ReferenceQuadrature qf = ReferenceQuadrature::build(config, fine);
  const ReferenceQuadrature qc = ReferenceQuadrature::build(config, coarse);
  const FdDerivative fd_f = action_derivative_fd(config, variation, kind, kDefaultLadder, qf);
  const FdDerivative fd_cs = action_derivative_fd(config, variation, kind, kDefaultLadder, qc);
  const FdDerivative fd_c =
      action_derivative_fd(config, variation, kind, scaled(kDefaultLadder, 2.0), qc);
  IdentityCheck c;
  c.test = config.name + "/" + variation.name + "/" + action_name(kind);
  c.terms = first_variation_rhs(config, variation, kind, qf);
  const double rhs_c = first_variation_rhs(config, variation, kind, qc).total();
  finish(c, fd_f.derivative, c.terms.total(), fd_f.richardson_error, fd_cs.derivative,
         fd_c.derivative, rhs_c);
  return c;
}

IdentityCheck check_energy_part(const MultiphaseConfiguration& config,
                                const VariationField& variation, EnergyPart part, double t,
                                const Discretization& fine, const Discretization& coarse) {
  const ReferenceQuadrature qf = ReferenceQuadrature::build(config, fine);
  const ReferenceQuadrature qc = ReferenceQuadrature::build(config, coarse);
  auto fd = [&](const ReferenceQuadrature& q, const std::vector<double>& ladder) {
    const double magnitude = std::abs(energy_part(config, part, q, t));
    return parallel_richardson(
        [&](double eps) {
          return energy_part(perturbed_config(config, variation, eps), part, q, t);
        },
        ladder, magnitude);
  };
  const FdDerivative fd_f = fd(qf, kDefaultLadder);
  const FdDerivative fd_cs = fd(qc, kDefaultLadder);
  const FdDerivative fd_c = fd(qc, scaled(kDefaultLadder, 2.0));
  IdentityCheck c;
  c.test = config.name + "/" + variation.name + "/" + energy_part_name(part) +
           (is_kinetic(part) ? "" : "@t=" + short_fmt(t));
  const double rhs_f = energy_part_variation(config, variation, part, qf, t);
  const double rhs_c = energy_part_variation(config, variation, part, qc, t);
  finish(c, fd_f.derivative, rhs_f, fd_f.richardson_error, fd_cs.derivative, fd_c.derivative,
         rhs_c);
  return c;
}

// -- Euler-Lagrange residuals -------------------------------------------------------

EulerLagrangeReport euler_lagrange_residuals(const MultiphaseConfiguration& config,
                                             ActionKind kind, double t, int probes,
                                             std::uint64_t seed,
                                             const std::optional<ScalarField>& surface_pressure) {
  if (kind == ActionKind::IncompressibleSurface && !surface_pressure) {
    throw Error("incompressible-surface residuals need a surface pressure field");
  }
  EulerLagrangeReport r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  const double R0 = config.interface_radius;
  const double R1 = config.outer_radius;
  for (int i = 0; i < probes; ++i) {
    const Vec3 xa = R0 * std::cbrt(ur(rng)) * random_direction(rng);
    const BulkPointState sa = bulk_point_state(config.A, xa, t);
    r.momentum_A = std::max(r.momentum_A, (sa.rho * sa.acceleration + sa.grad_pressure).norm());
    r.continuity_A = std::max(r.continuity_A,
                              kinematics::bulk_continuity_residual(config.A.flow, config.A.rho0, xa, t));
    const double rb = std::cbrt(R0 * R0 * R0 + ur(rng) * (R1 * R1 * R1 - R0 * R0 * R0));
    const Vec3 xb = rb * random_direction(rng);
    const BulkPointState sb = bulk_point_state(config.B, xb, t);
    r.momentum_B = std::max(r.momentum_B, (sb.rho * sb.acceleration + sb.grad_pressure).norm());
    r.continuity_B = std::max(r.continuity_B,
                              kinematics::bulk_continuity_residual(config.B.flow, config.B.rho0, xb, t));
  }
  const MovingSurface surf(geometry::ChartAtlas::sphere(R0), config.S.flow);
  for (int i = 0; i < probes; ++i) {
    const Vec3 xi = R0 * random_direction(rng);
    const SurfacePoint p = locate_or_throw(surf.atlas(), xi);
    const double jump = one_sided_pressure(config.B, xi, t) - one_sided_pressure(config.A, xi, t);
    Vec3 res;
    if (kind == ActionKind::ConstantTension) {
      const geometry::LocalFrame f = surf.frame(p, t, true);
      res = (tension(config) * f.mean_curvature + jump) * f.normal;
    } else {
      const SurfacePointState st = surface_point_state(surf, config.S.rho0, p, t);
      res = st.rho * st.acceleration + jump * st.normal;
      if (kind == ActionKind::CompressibleSurface) {
        const BarotropicLaw& law = surface_law(config);
        law.check(st.rho);
        res += st.rho * law.p_second(st.rho) * st.grad_rho +
               total_pressure(law, st.rho) * st.mean_curvature * st.normal;
      } else {
        const Mat3 P = Mat3::Identity() - st.normal * st.normal.transpose();
        const double pi = (*surface_pressure)(st.x);
        res += P * surface_pressure->gradient(st.x) + pi * st.mean_curvature * st.normal;
        r.surface_divergence =
            std::max(r.surface_divergence, std::abs(surf.velocity_surface_divergence(p, t)));
      }
      r.continuity_S = std::max(
          r.continuity_S, kinematics::surface_continuity_residual(surf, config.S.rho0, p, t));
    }
    r.momentum_S = std::max(r.momentum_S, res.norm());
  }
  return r;
}

}  // namespace varflow::variational
