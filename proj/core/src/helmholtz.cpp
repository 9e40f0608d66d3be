#include "varflow/helmholtz.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "varflow/quadrature_rules.hpp"

namespace varflow::helmholtz {

namespace {

struct HarmonicJet {
  std::vector<double> y;
  std::vector<Vec3> grad;  // tangential gradient on the sphere
  Vec3 n;
};

HarmonicJet harmonics_at(const sh::SolidHarmonics& basis, const Sphere& s, const Vec3& x) {
  HarmonicJet h;
  const Vec3 u = (x - s.center) / s.radius;
  h.n = u.normalized();
  basis.evaluate(h.n, h.y, h.grad);
  const Mat3 P = Mat3::Identity() - h.n * h.n.transpose();
  for (Vec3& g : h.grad) g = (P * g / s.radius).eval();
  return h;
}

void check_sphere(const Sphere& s) {
  if (!(s.radius > 0.0)) throw Error("sphere radius must be positive");
  if (!(2.0 / s.radius >= 1e-12)) {
    throw CurvatureDegenerateError("mean curvature of the sphere is below 1e-12");
  }
}

}  // namespace

SurfacePotential::SurfacePotential(Sphere sphere, int max_degree, std::vector<double> coefficients)
    : sphere_(std::move(sphere)),
      max_degree_(max_degree),
      coeffs_(std::move(coefficients)),
      basis_(std::make_shared<sh::SolidHarmonics>(max_degree)) {
  if (static_cast<int>(coeffs_.size()) != basis_->size()) {
    throw Error("SurfacePotential: coefficient count does not match degree");
  }
}

double SurfacePotential::coefficient(int degree, int order) const {
  if (degree < 0 || degree > max_degree_ || std::abs(order) > degree) return 0.0;
  return coeffs_[static_cast<std::size_t>(sh::SolidHarmonics::index(degree, order))];
}

double SurfacePotential::operator()(const Vec3& x) const {
  std::vector<double> y;
  basis_->evaluate(((x - sphere_.center) / sphere_.radius).normalized(), y);
  double sum = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) sum += coeffs_[k] * y[k];
  return sum;
}

Vec3 SurfacePotential::surface_gradient(const Vec3& x) const {
  const HarmonicJet h = harmonics_at(*basis_, sphere_, x);
  Vec3 g = Vec3::Zero();
  for (std::size_t k = 0; k < h.grad.size(); ++k) g += coeffs_[k] * h.grad[k];
  return g;
}

Vec3 SurfacePotential::field(const Vec3& x) const {
  const HarmonicJet h = harmonics_at(*basis_, sphere_, x);
  const double H = -2.0 / sphere_.radius;
  Vec3 f = Vec3::Zero();
  for (std::size_t k = 0; k < h.grad.size(); ++k) {
    f += coeffs_[k] * (h.grad[k] + H * h.y[k] * h.n);
  }
  return f;
}

void SurfacePotential::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "degree,order,real_coeff\n";
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const sh::HarmonicIndex idx = sh::SolidHarmonics::harmonic(static_cast<int>(k));
    os << idx.degree << ',' << idx.order << ',' << coeffs_[k] << '\n';
  }
  os.precision(old);
}

SphereDecomposer::SphereDecomposer(Sphere sphere, int max_degree,
                                   const geometry::QuadratureOptions& quad)
    : sphere_(sphere),
      max_degree_(max_degree),
      atlas_((check_sphere(sphere), geometry::ChartAtlas::sphere(sphere.radius, sphere.center))),
      quad_(geometry::make_quadrature(atlas_, quad)),
      basis_(std::make_shared<sh::SolidHarmonics>(max_degree)) {
  const Eigen::Index rows = static_cast<Eigen::Index>(3 * quad_.size());
  const Eigen::Index cols = basis_->size();
  Eigen::MatrixXd A(rows, cols);
  const double H = -2.0 / sphere_.radius;
  sqrt_w_.resize(quad_.size());
  for (std::size_t i = 0; i < quad_.size(); ++i) {
    sqrt_w_[i] = std::sqrt(quad_.weights[i]);
    const HarmonicJet h = harmonics_at(*basis_, sphere_, quad_.nodes[i].position);
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const Vec3 b = h.grad[ku] + H * h.y[ku] * h.n;
      for (int d = 0; d < 3; ++d) A(static_cast<Eigen::Index>(3 * i) + d, k) = sqrt_w_[i] * b[d];
    }
  }
  qr_.compute(A);
}

Vec3 SphereDecomposer::divergence_free_field(int degree, int order, bool rotational,
                                             const Vec3& x) const {
  const sh::SolidHarmonics basis(degree);
  const HarmonicJet h = harmonics_at(basis, sphere_, x);
  const auto k = static_cast<std::size_t>(sh::SolidHarmonics::index(degree, order));
  if (rotational) return h.n.cross(h.grad[k]);
  const double c = degree * (degree + 1.0) / (2.0 * sphere_.radius);
  return h.grad[k] + c * h.y[k] * h.n;
}

double SphereDecomposer::orthogonality_defect(const SurfaceField& F, int test_degree) const {
  if (test_degree < 1) return 0.0;
  const sh::SolidHarmonics basis(test_degree);
  const int K = basis.size();
  std::vector<CompensatedSum> rot(static_cast<std::size_t>(K));
  std::vector<CompensatedSum> mix(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < quad_.size(); ++i) {
    const Vec3 f = F(quad_.nodes[i]);
    const HarmonicJet h = harmonics_at(basis, sphere_, quad_.nodes[i].position);
    const Vec3 fxn = f.cross(h.n);  // f . (n x g) = (f x n) . g
    const double fn = f.dot(h.n);
    for (int k = 1; k < K; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const int l = sh::SolidHarmonics::harmonic(k).degree;
      const double c = l * (l + 1.0) / (2.0 * sphere_.radius);
      rot[ku] += quad_.weights[i] * fxn.dot(h.grad[ku]);
      mix[ku] += quad_.weights[i] * (f.dot(h.grad[ku]) + c * h.y[ku] * fn);
    }
  }
  double defect = 0.0;
  for (int k = 1; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    defect = std::max({defect, std::abs(rot[ku].value()), std::abs(mix[ku].value())});
  }
  return defect;
}

double SphereDecomposer::l2_norm(const SurfaceField& F) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < quad_.size(); ++i) {
    s += quad_.weights[i] * F(quad_.nodes[i]).squaredNorm();
  }
  return std::sqrt(std::max(0.0, s.value()));
}

SurfacePotential SphereDecomposer::fit(const SurfaceField& F) const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(3 * quad_.size()));
  for (std::size_t i = 0; i < quad_.size(); ++i) {
    const Vec3 f = F(quad_.nodes[i]);
    for (int d = 0; d < 3; ++d) b(static_cast<Eigen::Index>(3 * i) + d) = sqrt_w_[i] * f[d];
  }
  const Eigen::VectorXd c = qr_.solve(b);
  SurfacePotential pot(sphere_, max_degree_, std::vector<double>(c.data(), c.data() + c.size()));
  CompensatedSum r2;
  for (std::size_t i = 0; i < quad_.size(); ++i) {
    const Vec3 diff = F(quad_.nodes[i]) - pot.field(quad_.nodes[i].position);
    r2 += quad_.weights[i] * diff.squaredNorm();
  }
  pot.residual = std::sqrt(std::max(0.0, r2.value()));
  return pot;
}

SurfacePotential SphereDecomposer::decompose(const SurfaceField& F, double tol) const {
  const double defect = orthogonality_defect(F, max_degree_);
  const double scale = std::max(1.0, l2_norm(F));
  if (defect > tol * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "field is not orthogonal to surface-divergence-free fields: defect " << defect
        << " exceeds " << tol * scale;
    throw HypothesisViolatedError(msg.str());
  }
  SurfacePotential pot = fit(F);
  pot.defect = defect;
  return pot;
}

SurfacePotential incompressible_surface_pressure(const SphereDecomposer& decomposer,
                                                 const FrozenInterface& state,
                                                 double tol) {
  const Sphere s = decomposer.sphere();
  auto F = [&](const geometry::SurfacePoint& p) -> Vec3 {
    const Vec3& x = p.position;
    const Vec3 n = (x - s.center).normalized();
    Vec3 f = (state.pressure_inside(x) - state.pressure_outside(x)) * n;
    if (state.surface_density && state.surface_acceleration) {
      f -= state.surface_density(x) * state.surface_acceleration(x);
    }
    return f;
  };
  return decomposer.decompose(F, tol);
}

}  // namespace varflow::helmholtz
