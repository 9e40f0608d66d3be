#pragma once

// Flow maps of bulk regions and of the interface, their velocities and metric
// determinants, transported integrals and the continuity-equation residuals
// of densities realized by pullback.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "varflow/fields.hpp"
#include "varflow/surface_geometry.hpp"
#include "varflow/types.hpp"

namespace varflow::kinematics {

using SpaceTimeScalar = std::function<double(const Vec3&, double)>;
using ReferenceIndicator = std::function<bool(const Vec3&)>;

/// Time step of the finite differences in t (scaled by max(1, T)).
inline constexpr double kTimeFdStep = 1e-4;

/// Smooth family of diffeomorphisms x = position(xi, t) with position(xi, 0) = xi.
/// Only `position` and `inverse` are mandatory; missing derivatives fall back
/// to fourth-order finite differences.
struct BulkFlowMap {
  std::string name;
  std::function<Vec3(const Vec3&, double)> position;
  std::function<Vec3(const Vec3&, double)> inverse;
  std::function<Mat3(const Vec3&, double)> jacobian_fn;
  std::function<Vec3(const Vec3&, double)> time_derivative_fn;
  std::function<Vec3(const Vec3&, double)> second_time_derivative_fn;

  Vec3 operator()(const Vec3& xi, double t) const { return position(xi, t); }
  Mat3 jacobian(const Vec3& xi, double t) const;
  /// hess[k](i, j) = d^2 x_k / dxi_i dxi_j.
  std::array<Mat3, 3> hessian(const Vec3& xi, double t) const;
  /// d/dt x(xi, t) along a particle.
  Vec3 lagrangian_velocity(const Vec3& xi, double t) const;
  /// d^2/dt^2 x(xi, t) along a particle, i.e. D_t v at x(xi, t).
  Vec3 lagrangian_acceleration(const Vec3& xi, double t) const;
  /// Eulerian velocity v(x, t), so that d/dt x(xi, t) = v(x(xi, t), t).
  Vec3 velocity(const Vec3& x, double t) const;
  /// Row i = gradient of v_i at (x, t).
  Mat3 velocity_gradient(const Vec3& x, double t) const;
  double velocity_divergence(const Vec3& x, double t) const;
  VectorField velocity_field(double t) const;
};

// -- catalog -----------------------------------------------------------------

BulkFlowMap identity_flow();
/// x = (1 + rate t) xi.
BulkFlowMap dilation_flow(double rate);
/// Rigid rotation about the x3 axis with angular speed omega.
BulkFlowMap rotation_flow(double omega);
/// x = xi + rate t (xi_2, 0, 0).
BulkFlowMap shear_flow(double rate);
/// Radial breathing x = xi (1 + a sin(w t) (1 - |xi|^2 / r_fixed^2)); the
/// sphere |xi| = r_fixed does not move.
BulkFlowMap breathing_flow(double amplitude, double frequency, double r_fixed);
/// Differential rotation about x3 by angle omega t (1 - |xi|^2/r_fixed^2)^2.
/// Volume preserving; spheres about the origin are invariant.
BulkFlowMap swirl_flow(double omega, double r_fixed);
/// x = outer(inner(xi, t), t).
BulkFlowMap compose(const BulkFlowMap& outer, const BulkFlowMap& inner);

/// Catalog lookup by name: identity, dilation{rate}, rotation{omega},
/// shear{rate}, breathing{amplitude, frequency, r_fixed},
/// swirl{omega, r_fixed}. Throws ConfigError on unknown names.
BulkFlowMap flow_from_catalog(const std::string& name, const std::map<std::string, double>& params);

// -- metrics -----------------------------------------------------------------

/// |det grad_xi x|; throws SingularMetricError when it vanishes.
double bulk_sqrt_metric(const BulkFlowMap& flow, const Vec3& xi, double t);

/// Fourth-order central difference of g at t with step kTimeFdStep max(1, T).
double time_derivative(const std::function<double(double)>& g, double t, double horizon = 1.0);

/// The interface transported by a flow: chart X of the reference atlas goes
/// to x(Phi(X), t).
class MovingSurface {
 public:
  MovingSurface(geometry::ChartAtlas atlas, BulkFlowMap flow);

  const geometry::ChartAtlas& atlas() const { return atlas_; }
  const BulkFlowMap& flow() const { return flow_; }

  Vec3 position(const geometry::SurfacePoint& p, double t) const;
  Mat32 chart_jacobian(const geometry::SurfacePoint& p, double t) const;
  geometry::ChartJet jet(const geometry::SurfacePoint& p, double t) const;
  geometry::LocalFrame frame(const geometry::SurfacePoint& p, double t,
                             bool with_curvature = true) const;
  Vec3 interior_point(double t) const;

  /// sqrt(G_S) of the composed parameterization at (X, t).
  double sqrt_metric(const geometry::SurfacePoint& p, double t) const;
  /// sqrt(G_S)(X, t) / sqrt(G_S)(X, 0): the chart-independent area stretch.
  double area_ratio(const geometry::SurfacePoint& p, double t) const;
  Vec3 normal(const geometry::SurfacePoint& p, double t) const;
  double mean_curvature(const geometry::SurfacePoint& p, double t) const;
  /// div_Gamma v_S at the transported point.
  double velocity_surface_divergence(const geometry::SurfacePoint& p, double t) const;

 private:
  geometry::ChartAtlas atlas_;
  BulkFlowMap flow_;
};

// -- reference-domain quadrature ----------------------------------------------

struct VolumeQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Radial Gauss-Legendre times the unit-sphere quadrature.
VolumeQuadrature make_shell_quadrature(double r_in, double r_out, int n_r,
                                       const geometry::QuadratureOptions& directions = {},
                                       const Vec3& center = Vec3::Zero());
VolumeQuadrature make_ball_quadrature(double radius, int n_r,
                                      const geometry::QuadratureOptions& directions = {},
                                      const Vec3& center = Vec3::Zero());

// -- identities --------------------------------------------------------------

/// |int_{Omega(t)} f div v dx - int_{Omega(0)} f(x(xi,t),t) d/dt sqrt(G) dxi|,
/// both sides evaluated in reference coordinates; the left side uses the
/// spatial divergence of the Eulerian velocity, the right side a time
/// difference of the metric.
double bulk_metric_identity_residual(const BulkFlowMap& flow, const VolumeQuadrature& quad,
                                     const SpaceTimeScalar& f, double t, double horizon = 1.0);
/// Surface analog with div_Gamma v_S and sqrt(G_S).
double surface_metric_identity_residual(const MovingSurface& surface,
                                        const geometry::SurfaceQuadrature& quad,
                                        const SpaceTimeScalar& f, double t, double horizon = 1.0);

struct ContinuityOptions {
  int order = 4;               // 2 or 4: order of the time difference of the density
  double step = kTimeFdStep;   // absolute step in t
};

/// |D_t rho + (div v) rho| at x(xi, t) for rho(x(xi,t),t) = rho0(xi)/sqrt(G).
double bulk_continuity_residual(const BulkFlowMap& flow, const ScalarField& rho0, const Vec3& xi,
                                double t, const ContinuityOptions& opts = {});
/// Surface analog with rho_S = rho0_S / area_ratio.
double surface_continuity_residual(const MovingSurface& surface, const ScalarField& rho0,
                                   const geometry::SurfacePoint& p, double t,
                                   const ContinuityOptions& opts = {});

/// Integral over the transported region (or the transported subset selected
/// by `indicator` on reference points) computed in reference coordinates.
double pushforward_integral(const BulkFlowMap& flow, const VolumeQuadrature& quad,
                            const SpaceTimeScalar& f, double t,
                            const ReferenceIndicator& indicator = {});
double pushforward_integral(const MovingSurface& surface, const geometry::SurfaceQuadrature& quad,
                            const SpaceTimeScalar& f, double t,
                            const ReferenceIndicator& indicator = {});

/// One line of a residual report.
struct ResidualRecord {
  std::string identity;
  std::string test_case;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

ResidualRecord make_record(std::string identity, std::string test_case, double residual,
                           double tolerance);

}  // namespace varflow::kinematics
