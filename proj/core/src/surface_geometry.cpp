#include "varflow/surface_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <utility>

#include "varflow/quadrature_rules.hpp"

namespace varflow::geometry {

double smooth_step(double u, double band) {
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  if (u >= band) return 1.0;
  if (u <= -band) return 0.0;
  const double a = f(band + u);
  const double b = f(band - u);
  return a / (a + b);
}

namespace {

// Stereographic parameterization of the unit sphere. `sign` = +1 covers the
// northern cap (projection from the south pole), -1 the southern cap. Both
// keep the azimuth of X equal to the physical azimuth.
struct UnitCapJet {
  Vec3 s;
  Mat32 d;
  Vec3 d11, d12, d22;
};

UnitCapJet unit_cap_jet(const Vec2& X, double sign) {
  const double r2 = X.squaredNorm();
  const double D = 1.0 + r2;
  const double D2 = D * D;
  const double D3 = D2 * D;
  UnitCapJet j;
  j.s = Vec3(2.0 * X[0] / D, 2.0 * X[1] / D, sign * (1.0 - r2) / D);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      j.d(b, a) = 2.0 * (a == b ? 1.0 : 0.0) / D - 4.0 * X[a] * X[b] / D2;
    }
    j.d(2, a) = sign * (-4.0 * X[a] / D2);
  }
  auto second = [&](int a, int c) {
    Vec3 out;
    for (int b = 0; b < 2; ++b) {
      const double dab = a == b ? 1.0 : 0.0;
      const double dac = a == c ? 1.0 : 0.0;
      const double dbc = b == c ? 1.0 : 0.0;
      out[b] = -4.0 * dab * X[c] / D2 - 4.0 * (dac * X[b] + dbc * X[a]) / D2 +
               16.0 * X[a] * X[b] * X[c] / D3;
    }
    const double dac = a == c ? 1.0 : 0.0;
    out[2] = sign * (-4.0 * dac / D2 + 16.0 * X[a] * X[c] / D3);
    return out;
  };
  j.d11 = second(0, 0);
  j.d12 = second(0, 1);
  j.d22 = second(1, 1);
  return j;
}

// Two stereographic caps of the affine image c + A * S^2.
std::vector<Chart> cap_charts(const Vec3& scale, const Vec3& center, double band) {
  if (!(band > 0.0 && band < 1.0)) throw Error("cap atlas: band must lie in (0, 1)");
  if ((scale.array() <= 0.0).any()) throw Error("cap atlas: semi-axes must be positive");
  const double r_support = std::sqrt((1.0 + band) / (1.0 - band));
  const double half = 1.05 * r_support;
  std::vector<Chart> charts;
  for (const double sign : {1.0, -1.0}) {
    Chart c;
    c.domain = ParamRect{-half, half, -half, half};
    c.jet = [scale, center, sign](const Vec2& X) {
      const UnitCapJet u = unit_cap_jet(X, sign);
      ChartJet j;
      j.x = center + scale.cwiseProduct(u.s);
      j.d = scale.asDiagonal() * u.d;
      j.d11 = scale.cwiseProduct(u.d11);
      j.d12 = scale.cwiseProduct(u.d12);
      j.d22 = scale.cwiseProduct(u.d22);
      return j;
    };
    // Weight of a cap is the step of the height measured toward its own pole.
    c.bump = [band](const Vec2& X) {
      const double r2 = X.squaredNorm();
      return smooth_step((1.0 - r2) / (1.0 + r2), band);
    };
    c.inverse = [scale, center, sign, half](const Vec3& x) -> std::optional<Vec2> {
      const Vec3 s = (x - center).cwiseQuotient(scale);
      const double den = 1.0 + sign * s[2];
      if (den < 1e-14) return std::nullopt;
      const Vec2 X(s[0] / den, s[1] / den);
      if (std::abs(X[0]) > half || std::abs(X[1]) > half) return std::nullopt;
      return X;
    };
    CapLayout layout;
    if (sign > 0.0) {
      layout.u_breaks = {-band, band, 1.0};
      layout.param = [](double u, double th) {
        const double r = std::sqrt((1.0 - u) / (1.0 + u));
        return Vec2(r * std::cos(th), r * std::sin(th));
      };
      layout.param_jacobian = [](double u, double) { return 1.0 / ((1.0 + u) * (1.0 + u)); };
    } else {
      layout.u_breaks = {-1.0, -band, band};
      layout.param = [](double u, double th) {
        const double r = std::sqrt((1.0 + u) / (1.0 - u));
        return Vec2(r * std::cos(th), r * std::sin(th));
      };
      layout.param_jacobian = [](double u, double) { return 1.0 / ((1.0 - u) * (1.0 - u)); };
    }
    c.layout = std::move(layout);
    charts.push_back(std::move(c));
  }
  return charts;
}

}  // namespace

ChartAtlas::ChartAtlas(std::string name, std::vector<Chart> charts, Vec3 interior_point)
    : name_(std::move(name)), charts_(std::move(charts)), interior_(std::move(interior_point)) {
  if (charts_.empty()) throw Error("ChartAtlas: at least one chart required");
}

ChartAtlas ChartAtlas::sphere(double radius, const Vec3& center, double band) {
  if (!(radius > 0.0)) throw Error("sphere: radius must be positive");
  return ChartAtlas("sphere", cap_charts(Vec3::Constant(radius), center, band), center);
}

ChartAtlas ChartAtlas::ellipsoid(double a, double b, double c, const Vec3& center, double band) {
  return ChartAtlas("ellipsoid", cap_charts(Vec3(a, b, c), center, band), center);
}

ChartAtlas ChartAtlas::plane_patch(double half_width) {
  Chart c;
  c.domain = ParamRect{-half_width, half_width, -half_width, half_width};
  c.jet = [](const Vec2& X) {
    ChartJet j;
    j.x = Vec3(X[0], X[1], 0.0);
    j.d << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    return j;
  };
  c.bump = [](const Vec2&) { return 1.0; };
  c.inverse = [half_width](const Vec3& x) -> std::optional<Vec2> {
    if (std::abs(x[0]) > half_width || std::abs(x[1]) > half_width) return std::nullopt;
    return Vec2(x[0], x[1]);
  };
  std::vector<Chart> charts;
  charts.push_back(std::move(c));
  return ChartAtlas("plane_patch", std::move(charts), Vec3(0.0, 0.0, -1.0));
}

ChartJet ChartAtlas::jet(const SurfacePoint& p) const {
  return charts_.at(static_cast<std::size_t>(p.chart_index)).jet(p.parameters);
}

SurfacePoint ChartAtlas::point(int chart_index, const Vec2& X) const {
  SurfacePoint p;
  p.chart_index = chart_index;
  p.parameters = X;
  p.position = charts_.at(static_cast<std::size_t>(chart_index)).jet(X).x;
  return p;
}

std::optional<SurfacePoint> ChartAtlas::locate(const Vec3& x) const {
  std::optional<SurfacePoint> best;
  double best_weight = -1.0;
  for (std::size_t m = 0; m < charts_.size(); ++m) {
    if (!charts_[m].inverse) continue;
    const auto X = charts_[m].inverse(x);
    if (!X) continue;
    const double w = charts_[m].bump(*X);
    if (w > best_weight) {
      best_weight = w;
      best = point(static_cast<int>(m), *X);
    }
  }
  return best;
}

double ChartAtlas::partition_sum(const Vec3& x) const {
  double sum = 0.0;
  for (const Chart& c : charts_) {
    if (!c.inverse) continue;
    if (const auto X = c.inverse(x)) sum += c.bump(*X);
  }
  return sum;
}

LocalFrame local_frame(const ChartJet& jet, const Vec3& interior_point, bool with_curvature) {
  const Vec3 t1 = jet.d.col(0);
  const Vec3 t2 = jet.d.col(1);
  const Vec3 cross = t1.cross(t2);
  const double area = cross.norm();
  if (!(area > 1e-12 * t1.norm() * t2.norm()) || area == 0.0) {
    throw SingularChartError("chart Jacobian has rank < 2");
  }
  LocalFrame frame;
  frame.normal = cross / area;
  if (frame.normal.dot(jet.x - interior_point) < 0.0) frame.normal = -frame.normal;
  frame.area_element = area;
  frame.mean_curvature = 0.0;
  if (with_curvature) {
    Mat2 g;
    g << t1.dot(t1), t1.dot(t2), t1.dot(t2), t2.dot(t2);
    const Mat2 gi = g.inverse();
    const Vec3& n = frame.normal;
    frame.mean_curvature = gi(0, 0) * n.dot(jet.d11) + 2.0 * gi(0, 1) * n.dot(jet.d12) +
                           gi(1, 1) * n.dot(jet.d22);
  }
  return frame;
}

Vec3 unit_normal(const ChartAtlas& atlas, const SurfacePoint& p) {
  return local_frame(atlas.jet(p), atlas.interior_point(), false).normal;
}

double area_element(const ChartAtlas& atlas, const SurfacePoint& p) {
  return local_frame(atlas.jet(p), atlas.interior_point(), false).area_element;
}

Mat3 tangential_projector(const ChartAtlas& atlas, const SurfacePoint& p) {
  const Vec3 n = unit_normal(atlas, p);
  return Mat3::Identity() - n * n.transpose();
}

Vec3 surface_gradient(const ChartAtlas& atlas, const ScalarField& f, const SurfacePoint& p) {
  return tangential_projector(atlas, p) * f.gradient(p.position);
}

double surface_divergence(const ChartAtlas& atlas, const VectorField& F, const SurfacePoint& p) {
  const Mat3 P = tangential_projector(atlas, p);
  return P.cwiseProduct(F.jacobian(p.position)).sum();
}

double mean_curvature(const ChartAtlas& atlas, const SurfacePoint& p) {
  return local_frame(atlas.jet(p), atlas.interior_point(), true).mean_curvature;
}

SurfaceQuadrature make_quadrature(const ChartAtlas& atlas, const QuadratureOptions& opts) {
  if (opts.n_u < 1 || opts.n_theta < 1) throw Error("make_quadrature: node counts must be >= 1");
  SurfaceQuadrature quad;
  for (std::size_t m = 0; m < atlas.chart_count(); ++m) {
    const Chart& c = atlas.chart(m);
    const int idx = static_cast<int>(m);
    if (c.layout) {
      const CapLayout& lay = *c.layout;
      // Panels per chart are the shared breaks refined by the extra breaks;
      // the node budget is split evenly over the original panels.
      const int base_panels = static_cast<int>(lay.u_breaks.size()) - 1;
      const int per_panel = std::max(2, opts.n_u / std::max(1, base_panels));
      std::vector<double> breaks = lay.u_breaks;
      for (const double e : opts.extra_u_breaks) {
        if (e > breaks.front() && e < breaks.back()) breaks.push_back(e);
      }
      std::sort(breaks.begin(), breaks.end());
      breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
      const Rule1D ru = composite_gauss_legendre(breaks, per_panel);
      const Rule1D rt = periodic_trapezoid(opts.n_theta, 0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < ru.size(); ++i) {
        for (std::size_t k = 0; k < rt.size(); ++k) {
          const double u = ru.nodes[i];
          const double th = rt.nodes[k];
          const Vec2 X = lay.param(u, th);
          const double psi = c.bump(X);
          if (psi == 0.0) continue;
          const ChartJet j = c.jet(X);
          const double sqrt_g = local_frame(j, atlas.interior_point(), false).area_element;
          SurfacePoint p{j.x, idx, X};
          quad.nodes.push_back(p);
          quad.weights.push_back(ru.weights[i] * rt.weights[k] * lay.param_jacobian(u, th) *
                                 sqrt_g * psi);
        }
      }
    } else {
      const Rule1D r1 = gauss_legendre(opts.n_u, c.domain.x1_min, c.domain.x1_max);
      const Rule1D r2 = gauss_legendre(opts.n_theta, c.domain.x2_min, c.domain.x2_max);
      for (std::size_t i = 0; i < r1.size(); ++i) {
        for (std::size_t k = 0; k < r2.size(); ++k) {
          const Vec2 X(r1.nodes[i], r2.nodes[k]);
          const double psi = c.bump(X);
          if (psi == 0.0) continue;
          const ChartJet j = c.jet(X);
          const double sqrt_g = local_frame(j, atlas.interior_point(), false).area_element;
          quad.nodes.push_back(SurfacePoint{j.x, idx, X});
          quad.weights.push_back(r1.weights[i] * r2.weights[k] * sqrt_g * psi);
        }
      }
    }
  }
  return quad;
}

void write_quadrature_csv(std::ostream& os, const SurfaceQuadrature& quad) {
  const auto old_precision = os.precision(17);
  os << "chart_index,X1,X2,x,y,z,weight\n";
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const SurfacePoint& p = quad.nodes[i];
    os << p.chart_index << ',' << p.parameters[0] << ',' << p.parameters[1] << ','
       << p.position[0] << ',' << p.position[1] << ',' << p.position[2] << ','
       << quad.weights[i] << '\n';
  }
  os.precision(old_precision);
}

double integrate_surface(const SurfaceQuadrature& quad,
                         const std::function<double(const SurfacePoint&)>& f) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < quad.size(); ++i) sum += quad.weights[i] * f(quad.nodes[i]);
  return sum.value();
}

double integrate_surface(const SurfaceQuadrature& quad, const ScalarField& f) {
  return integrate_surface(quad, [&](const SurfacePoint& p) { return f(p.position); });
}

double check_surface_divergence_theorem(const ChartAtlas& atlas, const SurfaceQuadrature& quad,
                                        const VectorField& F) {
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const SurfacePoint& p = quad.nodes[i];
    const LocalFrame fr = local_frame(atlas.jet(p), atlas.interior_point());
    const Mat3 P = Mat3::Identity() - fr.normal * fr.normal.transpose();
    lhs += quad.weights[i] * P.cwiseProduct(F.jacobian(p.position)).sum();
    rhs += quad.weights[i] * fr.mean_curvature * F(p.position).dot(fr.normal);
  }
  return std::abs(lhs.value() + rhs.value());
}

double integration_by_parts_residual(const ChartAtlas& atlas, const SurfaceQuadrature& quad,
                                     const ScalarField& f, const ScalarField& g, int j) {
  if (j < 0 || j > 2) throw Error("integration_by_parts_residual: component out of range");
  CompensatedSum sum;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const SurfacePoint& p = quad.nodes[i];
    const LocalFrame fr = local_frame(atlas.jet(p), atlas.interior_point());
    const Mat3 P = Mat3::Identity() - fr.normal * fr.normal.transpose();
    const double fv = f(p.position);
    const double gv = g(p.position);
    const double dfj = (P * f.gradient(p.position))[j];
    const double dgj = (P * g.gradient(p.position))[j];
    sum += quad.weights[i] * (dfj * gv + fv * dgj + fr.mean_curvature * fv * gv * fr.normal[j]);
  }
  return std::abs(sum.value());
}

}  // namespace varflow::geometry
