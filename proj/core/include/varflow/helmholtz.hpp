#pragma once

// Gradient-plus-normal decomposition F = grad_Gamma Pi + Pi H n of surface
// fields on a sphere, the orthogonality test against surface-divergence-free
// fields that certifies it, and the interface pressure of an incompressible
// surface.

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/QR>

#include "varflow/spherical_harmonics.hpp"
#include "varflow/surface_geometry.hpp"
#include "varflow/types.hpp"

namespace varflow::helmholtz {

using SurfaceField = std::function<Vec3(const geometry::SurfacePoint&)>;

inline constexpr int kDefaultDegree = 16;
inline constexpr double kSpectralTolerance = 1e-8;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Truncated harmonic expansion of a potential on a sphere.
class SurfacePotential {
 public:
  SurfacePotential(Sphere sphere, int max_degree, std::vector<double> coefficients);

  const Sphere& sphere() const { return sphere_; }
  int max_degree() const { return max_degree_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double coefficient(int degree, int order) const;

  double operator()(const Vec3& x) const;
  Vec3 surface_gradient(const Vec3& x) const;
  /// grad_Gamma Pi + Pi H n with H = -2/R.
  Vec3 field(const Vec3& x) const;

  /// degree,order,real_coeff rows with 17 significant digits.
  void write_csv(std::ostream& os) const;

  /// Quadrature L2 norm of F - field(.) (set by the decomposer).
  double residual = 0.0;
  /// Orthogonality defect of the decomposed field (set by the decomposer).
  double defect = 0.0;

 private:
  Sphere sphere_;
  int max_degree_;
  std::vector<double> coeffs_;
  std::shared_ptr<const sh::SolidHarmonics> basis_;
};

/// Decomposition machinery for one sphere, truncation degree and quadrature.
/// The least-squares factorization is built once at construction.
class SphereDecomposer {
 public:
  explicit SphereDecomposer(Sphere sphere = {}, int max_degree = kDefaultDegree,
                            const geometry::QuadratureOptions& quad = {});

  const Sphere& sphere() const { return sphere_; }
  const geometry::ChartAtlas& atlas() const { return atlas_; }
  const geometry::SurfaceQuadrature& quadrature() const { return quad_; }
  int max_degree() const { return max_degree_; }

  /// Max |int F . phi| over the surface-divergence-free test fields of
  /// degree 1..test_degree: n x grad Y and grad Y + l(l+1)/(2R) Y n.
  double orthogonality_defect(const SurfaceField& F, int test_degree) const;

  /// Joint least-squares fit of the coefficients of Pi. Throws
  /// HypothesisViolatedError when the defect exceeds tol max(1, |F|).
  SurfacePotential decompose(const SurfaceField& F, double tol = kSpectralTolerance) const;
  /// Same fit without the hypothesis check.
  SurfacePotential fit(const SurfaceField& F) const;

  /// Quadrature L2 norm of a surface field.
  double l2_norm(const SurfaceField& F) const;

  /// One test field of orthogonality_defect evaluated at x on the sphere.
  Vec3 divergence_free_field(int degree, int order, bool rotational, const Vec3& x) const;

 private:
  Sphere sphere_;
  int max_degree_;
  geometry::ChartAtlas atlas_;
  geometry::SurfaceQuadrature quad_;
  std::shared_ptr<const sh::SolidHarmonics> basis_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  std::vector<double> sqrt_w_;
};

/// Frozen-time interface data of an incompressible-surface configuration.
struct FrozenInterface {
  std::function<double(const Vec3&)> surface_density;
  std::function<Vec3(const Vec3&)> surface_acceleration;  // D_t v_S
  std::function<double(const Vec3&)> pressure_inside;     // one-sided P_A
  std::function<double(const Vec3&)> pressure_outside;    // one-sided P_B
};

/// Pi_S with grad Pi + Pi H n = -rho_S D_t v_S + (P_A - P_B) n, plus the
/// residual and defect of that fit.
SurfacePotential incompressible_surface_pressure(const SphereDecomposer& decomposer,
                                                 const FrozenInterface& state,
                                                 double tol = kSpectralTolerance);

}  // namespace varflow::helmholtz
