#pragma once

// Closed surfaces described by chart atlases with a smooth partition of unity,
// tangential differential operators, mean curvature and surface quadrature.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varflow/fields.hpp"
#include "varflow/types.hpp"

namespace varflow::geometry {

struct ParamRect {
  double x1_min = -1.0;
  double x1_max = 1.0;
  double x2_min = -1.0;
  double x2_max = 1.0;

  bool contains(const Vec2& X) const {
    return X[0] >= x1_min && X[0] <= x1_max && X[1] >= x2_min && X[1] <= x2_max;
  }
};

/// Position and first/second parameter derivatives of a chart embedding.
struct ChartJet {
  Vec3 x = Vec3::Zero();
  Mat32 d = Mat32::Zero();  // columns: dx/dX1, dx/dX2
  Vec3 d11 = Vec3::Zero();
  Vec3 d12 = Vec3::Zero();
  Vec3 d22 = Vec3::Zero();
};

/// Node layout of a polar-cap chart: nodes are generated on latitude panels
/// in a normalized height u and an azimuth theta, then mapped to chart
/// parameters. Charts sharing a band use identical (u, theta) nodes there,
/// so their bump weights add up node by node.
struct CapLayout {
  std::vector<double> u_breaks;  // ascending panel breaks covered by this chart
  std::function<Vec2(double u, double theta)> param;
  std::function<double(double u, double theta)> param_jacobian;  // |det dX/d(u,theta)|
};

struct Chart {
  ParamRect domain;
  std::function<ChartJet(const Vec2&)> jet;
  std::function<double(const Vec2&)> bump;  // partition-of-unity weight in parameters
  std::function<std::optional<Vec2>(const Vec3&)> inverse;  // optional
  std::optional<CapLayout> layout;
};

struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  int chart_index = 0;
  Vec2 parameters = Vec2::Zero();
};

/// Closed surface given by charts and a partition of unity. Immutable.
class ChartAtlas {
 public:
  ChartAtlas(std::string name, std::vector<Chart> charts, Vec3 interior_point);

  /// Two stereographic polar-cap charts. `band` is the half width (in the
  /// normalized height) of the latitude band where the bump weights blend.
  static ChartAtlas sphere(double radius, const Vec3& center = Vec3::Zero(), double band = 0.5);
  /// Axis-aligned ellipsoid with semi-axes (a, b, c); caps blend in x3.
  static ChartAtlas ellipsoid(double a, double b, double c, const Vec3& center = Vec3::Zero(),
                              double band = 0.5);
  /// Flat patch {x3 = 0, |x1|,|x2| <= half_width} with upward normal. Not
  /// closed; meant for pointwise operator checks only.
  static ChartAtlas plane_patch(double half_width = 1.0);

  const std::string& name() const { return name_; }
  std::size_t chart_count() const { return charts_.size(); }
  const Chart& chart(std::size_t m) const { return charts_.at(m); }
  const std::vector<Chart>& charts() const { return charts_; }
  const Vec3& interior_point() const { return interior_; }

  ChartJet jet(const SurfacePoint& p) const;
  SurfacePoint point(int chart_index, const Vec2& X) const;
  /// Surface point for an ambient position on the surface, using the chart
  /// with the largest bump weight there.
  std::optional<SurfacePoint> locate(const Vec3& x) const;
  /// Sum of all bump weights at x, each evaluated through its own chart.
  double partition_sum(const Vec3& x) const;

 private:
  std::string name_;
  std::vector<Chart> charts_;
  Vec3 interior_;
};

/// Nodes and weights of a surface quadrature; each weight already contains
/// the area element and the bump weight of its chart.
struct SurfaceQuadrature {
  std::vector<SurfacePoint> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

struct QuadratureOptions {
  int n_u = 48;      // latitude nodes per chart
  int n_theta = 48;  // azimuth nodes per chart
  /// Additional latitude breaks (normalized height) where an integrand may
  /// be discontinuous, e.g. 0.0 for a hemisphere indicator.
  std::vector<double> extra_u_breaks;
};

SurfaceQuadrature make_quadrature(const ChartAtlas& atlas, const QuadratureOptions& opts = {});

/// Writes chart_index,X1,X2,x,y,z,weight rows with 17 significant digits.
void write_quadrature_csv(std::ostream& os, const SurfaceQuadrature& quad);

// -- pointwise operators ------------------------------------------------------

Vec3 unit_normal(const ChartAtlas& atlas, const SurfacePoint& p);
/// sqrt(g11 g22 - g12 g21) of the chart at p.
double area_element(const ChartAtlas& atlas, const SurfacePoint& p);
/// I - n n^T.
Mat3 tangential_projector(const ChartAtlas& atlas, const SurfacePoint& p);
Vec3 surface_gradient(const ChartAtlas& atlas, const ScalarField& f, const SurfacePoint& p);
double surface_divergence(const ChartAtlas& atlas, const VectorField& F, const SurfacePoint& p);
/// H = -div_Gamma n with the outward normal; -2/R on a sphere of radius R.
double mean_curvature(const ChartAtlas& atlas, const SurfacePoint& p);

/// Geometry of a jet, shared by the operators above and by moving surfaces.
struct LocalFrame {
  Vec3 normal;
  double area_element;
  double mean_curvature;
};
LocalFrame local_frame(const ChartJet& jet, const Vec3& interior_point, bool with_curvature = true);

// -- integrals ---------------------------------------------------------------

double integrate_surface(const SurfaceQuadrature& quad,
                         const std::function<double(const SurfacePoint&)>& f);
double integrate_surface(const SurfaceQuadrature& quad, const ScalarField& f);

/// |int div_Gamma F + int H (F . n)|.
double check_surface_divergence_theorem(const ChartAtlas& atlas, const SurfaceQuadrature& quad,
                                        const VectorField& F);

/// |int (d_j f) g + int f (d_j g) + int H f g n_j| for tangential derivative d_j.
double integration_by_parts_residual(const ChartAtlas& atlas, const SurfaceQuadrature& quad,
                                     const ScalarField& f, const ScalarField& g, int j);

/// C-infinity step: 0 for u <= -band, 1 for u >= band, S(u) + S(-u) = 1.
double smooth_step(double u, double band);

}  // namespace varflow::geometry
