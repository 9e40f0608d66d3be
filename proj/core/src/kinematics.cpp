#include "varflow/kinematics.hpp"

#include <cmath>
#include <utility>

#include "varflow/quadrature_rules.hpp"

namespace varflow::kinematics {

namespace {

Mat3 rot_z(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  Mat3 m;
  m << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return m;
}

Mat3 rot_z_d1(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  Mat3 m;
  m << -s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0;
  return m;
}

Mat3 rot_z_d2(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  Mat3 m;
  m << -c, s, 0.0, -s, -c, 0.0, 0.0, 0.0, 0.0;
  return m;
}

double param(const std::map<std::string, double>& params, const std::string& flow,
             const std::string& key, std::optional<double> fallback = std::nullopt) {
  const auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw ConfigError("flow '" + flow + "' requires parameter '" + key + "'");
}

}  // namespace

Mat3 BulkFlowMap::jacobian(const Vec3& xi, double t) const {
  if (jacobian_fn) return jacobian_fn(xi, t);
  return fd_jacobian([&](const Vec3& y) { return position(y, t); }, xi);
}

std::array<Mat3, 3> BulkFlowMap::hessian(const Vec3& xi, double t) const {
  // Differences of the (preferably analytic) Jacobian along each xi_j.
  const double h = 1e-4;
  std::array<Mat3, 3> hess{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int j = 0; j < 3; ++j) {
    auto J = [&](double s) {
      Vec3 y = xi;
      y[j] += s;
      return jacobian(y, t);
    };
    const Mat3 dJ = (-J(2.0 * h) + 8.0 * J(h) - 8.0 * J(-h) + J(-2.0 * h)) / (12.0 * h);
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) hess[k](i, j) = dJ(k, i);
    }
  }
  for (auto& m : hess) m = (0.5 * (m + m.transpose())).eval();
  return hess;
}

Vec3 BulkFlowMap::lagrangian_velocity(const Vec3& xi, double t) const {
  if (time_derivative_fn) return time_derivative_fn(xi, t);
  const double h = kTimeFdStep;
  return (-position(xi, t + 2.0 * h) + 8.0 * position(xi, t + h) - 8.0 * position(xi, t - h) +
          position(xi, t - 2.0 * h)) /
         (12.0 * h);
}

Vec3 BulkFlowMap::lagrangian_acceleration(const Vec3& xi, double t) const {
  if (second_time_derivative_fn) return second_time_derivative_fn(xi, t);
  if (time_derivative_fn) {
    const double h = kTimeFdStep;
    auto v = [&](double s) { return time_derivative_fn(xi, s); };
    return (-v(t + 2.0 * h) + 8.0 * v(t + h) - 8.0 * v(t - h) + v(t - 2.0 * h)) / (12.0 * h);
  }
  const double h = 1e-3;
  auto x = [&](double s) { return position(xi, s); };
  return (-x(t + 2.0 * h) + 16.0 * x(t + h) - 30.0 * x(t) + 16.0 * x(t - h) - x(t - 2.0 * h)) /
         (12.0 * h * h);
}

Vec3 BulkFlowMap::velocity(const Vec3& x, double t) const {
  return lagrangian_velocity(inverse(x, t), t);
}

Mat3 BulkFlowMap::velocity_gradient(const Vec3& x, double t) const {
  return fd_jacobian([&](const Vec3& y) { return velocity(y, t); }, x);
}

double BulkFlowMap::velocity_divergence(const Vec3& x, double t) const {
  return velocity_gradient(x, t).trace();
}

VectorField BulkFlowMap::velocity_field(double t) const {
  BulkFlowMap self = *this;
  return VectorField([self, t](const Vec3& x) { return self.velocity(x, t); },
                     [self, t](const Vec3& x) { return self.velocity_gradient(x, t); });
}

BulkFlowMap identity_flow() {
  BulkFlowMap f;
  f.name = "identity";
  f.position = [](const Vec3& xi, double) { return xi; };
  f.inverse = [](const Vec3& x, double) { return x; };
  f.jacobian_fn = [](const Vec3&, double) { return Mat3::Identity().eval(); };
  f.time_derivative_fn = [](const Vec3&, double) { return Vec3::Zero().eval(); };
  f.second_time_derivative_fn = [](const Vec3&, double) { return Vec3::Zero().eval(); };
  return f;
}

BulkFlowMap dilation_flow(double rate) {
  BulkFlowMap f;
  f.name = "dilation";
  f.position = [rate](const Vec3& xi, double t) { return ((1.0 + rate * t) * xi).eval(); };
  f.inverse = [rate](const Vec3& x, double t) { return (x / (1.0 + rate * t)).eval(); };
  f.jacobian_fn = [rate](const Vec3&, double t) {
    return ((1.0 + rate * t) * Mat3::Identity()).eval();
  };
  f.time_derivative_fn = [rate](const Vec3& xi, double) { return (rate * xi).eval(); };
  f.second_time_derivative_fn = [](const Vec3&, double) { return Vec3::Zero().eval(); };
  return f;
}

BulkFlowMap rotation_flow(double omega) {
  BulkFlowMap f;
  f.name = "rotation";
  f.position = [omega](const Vec3& xi, double t) { return (rot_z(omega * t) * xi).eval(); };
  f.inverse = [omega](const Vec3& x, double t) { return (rot_z(-omega * t) * x).eval(); };
  f.jacobian_fn = [omega](const Vec3&, double t) { return rot_z(omega * t); };
  f.time_derivative_fn = [omega](const Vec3& xi, double t) {
    return (omega * rot_z_d1(omega * t) * xi).eval();
  };
  f.second_time_derivative_fn = [omega](const Vec3& xi, double t) {
    return (omega * omega * rot_z_d2(omega * t) * xi).eval();
  };
  return f;
}

BulkFlowMap shear_flow(double rate) {
  BulkFlowMap f;
  f.name = "shear";
  f.position = [rate](const Vec3& xi, double t) {
    return Vec3(xi[0] + rate * t * xi[1], xi[1], xi[2]);
  };
  f.inverse = [rate](const Vec3& x, double t) {
    return Vec3(x[0] - rate * t * x[1], x[1], x[2]);
  };
  f.jacobian_fn = [rate](const Vec3&, double t) {
    Mat3 J = Mat3::Identity();
    J(0, 1) = rate * t;
    return J;
  };
  f.time_derivative_fn = [rate](const Vec3& xi, double) { return Vec3(rate * xi[1], 0.0, 0.0); };
  f.second_time_derivative_fn = [](const Vec3&, double) { return Vec3::Zero().eval(); };
  return f;
}

BulkFlowMap breathing_flow(double amplitude, double frequency, double r_fixed) {
  if (!(r_fixed > 0.0)) throw ConfigError("breathing flow: r_fixed must be positive");
  if (!(std::abs(amplitude) < 0.5)) {
    throw ConfigError("breathing flow: |amplitude| must be < 0.5 to stay a diffeomorphism");
  }
  const double a = amplitude;
  const double w = frequency;
  const double rf2 = r_fixed * r_fixed;
  BulkFlowMap f;
  f.name = "breathing";
  f.position = [a, w, rf2](const Vec3& xi, double t) {
    const double b = 1.0 - xi.squaredNorm() / rf2;
    return ((1.0 + a * std::sin(w * t) * b) * xi).eval();
  };
  f.inverse = [a, w, rf2](const Vec3& x, double t) {
    const double rho = x.norm();
    if (rho == 0.0) return Vec3::Zero().eval();
    const double s = a * std::sin(w * t);
    // Newton on r (1 + s (1 - r^2/rf2)) = rho; the map is monotone in r.
    double r = rho;
    for (int it = 0; it < 60; ++it) {
      const double g = r * (1.0 + s * (1.0 - r * r / rf2)) - rho;
      const double dg = 1.0 + s * (1.0 - 3.0 * r * r / rf2);
      const double dr = g / dg;
      r -= dr;
      if (std::abs(dr) <= 1e-16 * std::max(1.0, r)) break;
    }
    return (x * (r / rho)).eval();
  };
  f.jacobian_fn = [a, w, rf2](const Vec3& xi, double t) {
    const double s = a * std::sin(w * t);
    const double b = 1.0 - xi.squaredNorm() / rf2;
    return ((1.0 + s * b) * Mat3::Identity() - (2.0 * s / rf2) * xi * xi.transpose()).eval();
  };
  f.time_derivative_fn = [a, w, rf2](const Vec3& xi, double t) {
    const double b = 1.0 - xi.squaredNorm() / rf2;
    return (a * w * std::cos(w * t) * b * xi).eval();
  };
  f.second_time_derivative_fn = [a, w, rf2](const Vec3& xi, double t) {
    const double b = 1.0 - xi.squaredNorm() / rf2;
    return (-a * w * w * std::sin(w * t) * b * xi).eval();
  };
  return f;
}

BulkFlowMap swirl_flow(double omega, double r_fixed) {
  if (!(r_fixed > 0.0)) throw ConfigError("swirl flow: r_fixed must be positive");
  const double rf2 = r_fixed * r_fixed;
  auto profile = [rf2](double r2) {
    const double q = 1.0 - r2 / rf2;
    return q * q;
  };
  BulkFlowMap f;
  f.name = "swirl";
  f.position = [omega, profile](const Vec3& xi, double t) {
    return (rot_z(omega * t * profile(xi.squaredNorm())) * xi).eval();
  };
  f.inverse = [omega, profile](const Vec3& x, double t) {
    return (rot_z(-omega * t * profile(x.squaredNorm())) * x).eval();
  };
  f.jacobian_fn = [omega, rf2, profile](const Vec3& xi, double t) {
    const double r2 = xi.squaredNorm();
    const double alpha = omega * t * profile(r2);
    // grad alpha = omega t w'(r) xi / r with w'(r)/r = -4 (1 - r^2/rf2) / rf2.
    const Vec3 grad_alpha = omega * t * (-4.0 * (1.0 - r2 / rf2) / rf2) * xi;
    return (rot_z(alpha) + rot_z_d1(alpha) * xi * grad_alpha.transpose()).eval();
  };
  f.time_derivative_fn = [omega, profile](const Vec3& xi, double t) {
    const double w = profile(xi.squaredNorm());
    return (omega * w * rot_z_d1(omega * t * w) * xi).eval();
  };
  f.second_time_derivative_fn = [omega, profile](const Vec3& xi, double t) {
    const double w = profile(xi.squaredNorm());
    return (omega * omega * w * w * rot_z_d2(omega * t * w) * xi).eval();
  };
  return f;
}

BulkFlowMap compose(const BulkFlowMap& outer, const BulkFlowMap& inner) {
  BulkFlowMap f;
  f.name = outer.name + "*" + inner.name;
  f.position = [outer, inner](const Vec3& xi, double t) { return outer(inner(xi, t), t); };
  f.inverse = [outer, inner](const Vec3& x, double t) {
    return inner.inverse(outer.inverse(x, t), t);
  };
  f.jacobian_fn = [outer, inner](const Vec3& xi, double t) {
    return (outer.jacobian(inner(xi, t), t) * inner.jacobian(xi, t)).eval();
  };
  f.time_derivative_fn = [outer, inner](const Vec3& xi, double t) {
    const Vec3 y = inner(xi, t);
    return (outer.lagrangian_velocity(y, t) +
            outer.jacobian(y, t) * inner.lagrangian_velocity(xi, t))
        .eval();
  };
  return f;
}

BulkFlowMap flow_from_catalog(const std::string& name,
                              const std::map<std::string, double>& params) {
  if (name == "identity") return identity_flow();
  if (name == "dilation") return dilation_flow(param(params, name, "rate"));
  if (name == "rotation") return rotation_flow(param(params, name, "omega"));
  if (name == "shear") return shear_flow(param(params, name, "rate"));
  if (name == "breathing") {
    return breathing_flow(param(params, name, "amplitude"), param(params, name, "frequency"),
                          param(params, name, "r_fixed"));
  }
  if (name == "swirl") return swirl_flow(param(params, name, "omega"), param(params, name, "r_fixed"));
  throw ConfigError("unknown flow map '" + name + "'");
}

double bulk_sqrt_metric(const BulkFlowMap& flow, const Vec3& xi, double t) {
  const double det = flow.jacobian(xi, t).determinant();
  if (!(std::abs(det) > 1e-14)) throw SingularMetricError("flow-map Jacobian is singular");
  return std::abs(det);
}

double time_derivative(const std::function<double(double)>& g, double t, double horizon) {
  return central_diff4(g, t, kTimeFdStep * std::max(1.0, horizon));
}

MovingSurface::MovingSurface(geometry::ChartAtlas atlas, BulkFlowMap flow)
    : atlas_(std::move(atlas)), flow_(std::move(flow)) {}

Vec3 MovingSurface::position(const geometry::SurfacePoint& p, double t) const {
  return flow_(p.position, t);
}

Mat32 MovingSurface::chart_jacobian(const geometry::SurfacePoint& p, double t) const {
  const geometry::ChartJet j0 = atlas_.jet(p);
  return flow_.jacobian(j0.x, t) * j0.d;
}

geometry::ChartJet MovingSurface::jet(const geometry::SurfacePoint& p, double t) const {
  const geometry::ChartJet j0 = atlas_.jet(p);
  const Mat3 J = flow_.jacobian(j0.x, t);
  const std::array<Mat3, 3> H = flow_.hessian(j0.x, t);
  auto hess_term = [&](const Vec3& a, const Vec3& b) {
    return Vec3(a.dot(H[0] * b), a.dot(H[1] * b), a.dot(H[2] * b));
  };
  const Vec3 t1 = j0.d.col(0);
  const Vec3 t2 = j0.d.col(1);
  geometry::ChartJet j;
  j.x = flow_(j0.x, t);
  j.d = J * j0.d;
  j.d11 = hess_term(t1, t1) + J * j0.d11;
  j.d12 = hess_term(t1, t2) + J * j0.d12;
  j.d22 = hess_term(t2, t2) + J * j0.d22;
  return j;
}

Vec3 MovingSurface::interior_point(double t) const { return flow_(atlas_.interior_point(), t); }

geometry::LocalFrame MovingSurface::frame(const geometry::SurfacePoint& p, double t,
                                          bool with_curvature) const {
  if (with_curvature) return geometry::local_frame(jet(p, t), interior_point(t), true);
  geometry::ChartJet j;
  const geometry::ChartJet j0 = atlas_.jet(p);
  j.x = flow_(j0.x, t);
  j.d = flow_.jacobian(j0.x, t) * j0.d;
  return geometry::local_frame(j, interior_point(t), false);
}

double MovingSurface::sqrt_metric(const geometry::SurfacePoint& p, double t) const {
  const Mat32 d = chart_jacobian(p, t);
  const Mat2 g = d.transpose() * d;
  const double G = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  if (!(G > 0.0)) throw SingularMetricError("surface metric determinant is not positive");
  return std::sqrt(G);
}

double MovingSurface::area_ratio(const geometry::SurfacePoint& p, double t) const {
  return sqrt_metric(p, t) / sqrt_metric(p, 0.0);
}

Vec3 MovingSurface::normal(const geometry::SurfacePoint& p, double t) const {
  return frame(p, t, false).normal;
}

double MovingSurface::mean_curvature(const geometry::SurfacePoint& p, double t) const {
  return frame(p, t, true).mean_curvature;
}

double MovingSurface::velocity_surface_divergence(const geometry::SurfacePoint& p,
                                                  double t) const {
  const Vec3 n = normal(p, t);
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  return P.cwiseProduct(flow_.velocity_gradient(position(p, t), t)).sum();
}

VolumeQuadrature make_shell_quadrature(double r_in, double r_out, int n_r,
                                       const geometry::QuadratureOptions& directions,
                                       const Vec3& center) {
  if (!(r_out > r_in && r_in >= 0.0)) throw Error("shell quadrature: need 0 <= r_in < r_out");
  const geometry::SurfaceQuadrature dirs =
      geometry::make_quadrature(geometry::ChartAtlas::sphere(1.0), directions);
  const Rule1D rr = gauss_legendre(n_r, r_in, r_out);
  VolumeQuadrature q;
  q.nodes.reserve(rr.size() * dirs.size());
  q.weights.reserve(rr.size() * dirs.size());
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double r = rr.nodes[i];
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      q.nodes.push_back(center + r * dirs.nodes[k].position);
      q.weights.push_back(rr.weights[i] * r * r * dirs.weights[k]);
    }
  }
  return q;
}

VolumeQuadrature make_ball_quadrature(double radius, int n_r,
                                      const geometry::QuadratureOptions& directions,
                                      const Vec3& center) {
  return make_shell_quadrature(0.0, radius, n_r, directions, center);
}

double bulk_metric_identity_residual(const BulkFlowMap& flow, const VolumeQuadrature& quad,
                                     const SpaceTimeScalar& f, double t, double horizon) {
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const Vec3& xi = quad.nodes[i];
    const Vec3 x = flow(xi, t);
    const double fx = f(x, t);
    lhs += quad.weights[i] * fx * flow.velocity_divergence(x, t) * bulk_sqrt_metric(flow, xi, t);
    const double dG =
        time_derivative([&](double s) { return bulk_sqrt_metric(flow, xi, s); }, t, horizon);
    rhs += quad.weights[i] * fx * dG;
  }
  return std::abs(lhs.value() - rhs.value());
}

double surface_metric_identity_residual(const MovingSurface& surface,
                                        const geometry::SurfaceQuadrature& quad,
                                        const SpaceTimeScalar& f, double t, double horizon) {
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const geometry::SurfacePoint& p = quad.nodes[i];
    const double fx = f(surface.position(p, t), t);
    lhs += quad.weights[i] * fx * surface.velocity_surface_divergence(p, t) *
           surface.area_ratio(p, t);
    const double dG =
        time_derivative([&](double s) { return surface.area_ratio(p, s); }, t, horizon);
    rhs += quad.weights[i] * fx * dG;
  }
  return std::abs(lhs.value() - rhs.value());
}

namespace {

double density_rate(const std::function<double(double)>& rho, double t,
                    const ContinuityOptions& opts) {
  if (opts.order == 2) return central_diff2(rho, t, opts.step);
  if (opts.order == 4) return central_diff4(rho, t, opts.step);
  throw Error("continuity residual: order must be 2 or 4");
}

}  // namespace

double bulk_continuity_residual(const BulkFlowMap& flow, const ScalarField& rho0, const Vec3& xi,
                                double t, const ContinuityOptions& opts) {
  const double r0 = rho0(xi);
  auto rho = [&](double s) { return r0 / bulk_sqrt_metric(flow, xi, s); };
  const double Dt_rho = density_rate(rho, t, opts);
  const double div_v = flow.velocity_divergence(flow(xi, t), t);
  return std::abs(Dt_rho + div_v * rho(t));
}

double surface_continuity_residual(const MovingSurface& surface, const ScalarField& rho0,
                                   const geometry::SurfacePoint& p, double t,
                                   const ContinuityOptions& opts) {
  const double r0 = rho0(p.position);
  auto rho = [&](double s) { return r0 / surface.area_ratio(p, s); };
  const double Dt_rho = density_rate(rho, t, opts);
  const double div_v = surface.velocity_surface_divergence(p, t);
  return std::abs(Dt_rho + div_v * rho(t));
}

double pushforward_integral(const BulkFlowMap& flow, const VolumeQuadrature& quad,
                            const SpaceTimeScalar& f, double t,
                            const ReferenceIndicator& indicator) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const Vec3& xi = quad.nodes[i];
    if (indicator && !indicator(xi)) continue;
    sum += quad.weights[i] * f(flow(xi, t), t) * bulk_sqrt_metric(flow, xi, t);
  }
  return sum.value();
}

double pushforward_integral(const MovingSurface& surface, const geometry::SurfaceQuadrature& quad,
                            const SpaceTimeScalar& f, double t,
                            const ReferenceIndicator& indicator) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const geometry::SurfacePoint& p = quad.nodes[i];
    if (indicator && !indicator(p.position)) continue;
    sum += quad.weights[i] * f(surface.position(p, t), t) * surface.area_ratio(p, t);
  }
  return sum.value();
}

ResidualRecord make_record(std::string identity, std::string test_case, double residual,
                           double tolerance) {
  ResidualRecord r;
  r.identity = std::move(identity);
  r.test_case = std::move(test_case);
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = std::isfinite(residual) && residual <= tolerance;
  return r;
}

}  // namespace varflow::kinematics
