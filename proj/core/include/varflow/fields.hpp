#pragma once

#include <functional>
#include <utility>

#include "varflow/types.hpp"

namespace varflow {

/// Ambient step used when a field has no analytic derivative.
inline constexpr double kFieldFdStep = 1e-5;

/// Fourth-order central difference of a scalar function of one variable.
template <class F>
double central_diff4(F&& f, double x, double h) {
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

/// Second-order central difference.
template <class F>
double central_diff2(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Scalar field on R^3. The gradient is optional; when absent it is
/// approximated by fourth-order central differences.
struct ScalarField {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient_fn;

  ScalarField() = default;
  ScalarField(std::function<double(const Vec3&)> v,
              std::function<Vec3(const Vec3&)> g = {})
      : value(std::move(v)), gradient_fn(std::move(g)) {}

  double operator()(const Vec3& x) const { return value(x); }
  Vec3 gradient(const Vec3& x) const;

  static ScalarField constant(double c);
};

/// Vector field on R^3 with optional analytic Jacobian (row i = grad of
/// component i).
struct VectorField {
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> jacobian_fn;

  VectorField() = default;
  VectorField(std::function<Vec3(const Vec3&)> v,
              std::function<Mat3(const Vec3&)> j = {})
      : value(std::move(v)), jacobian_fn(std::move(j)) {}

  Vec3 operator()(const Vec3& x) const { return value(x); }
  Mat3 jacobian(const Vec3& x) const;

  static VectorField constant(const Vec3& c);
};

/// d/dx_j of a scalar function by fourth-order differences.
Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x,
                 double h = kFieldFdStep);

/// Jacobian (row i = gradient of component i) by fourth-order differences.
Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x,
                 double h = kFieldFdStep);

}  // namespace varflow
