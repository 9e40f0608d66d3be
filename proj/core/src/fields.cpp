#include "varflow/fields.hpp"

namespace varflow {

Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  Vec3 g;
  for (int j = 0; j < 3; ++j) {
    g[j] = central_diff4(
        [&](double s) {
          Vec3 y = x;
          y[j] = s;
          return f(y);
        },
        x[j], h);
  }
  return g;
}

Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double h) {
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    auto shifted = [&](double s) {
      Vec3 y = x;
      y[j] += s;
      return f(y);
    };
    const Vec3 col = (-shifted(2.0 * h) + 8.0 * shifted(h) - 8.0 * shifted(-h) + shifted(-2.0 * h)) /
                     (12.0 * h);
    jac.col(j) = col;
  }
  return jac;
}

Vec3 ScalarField::gradient(const Vec3& x) const {
  if (gradient_fn) return gradient_fn(x);
  return fd_gradient(value, x);
}

ScalarField ScalarField::constant(double c) {
  return ScalarField([c](const Vec3&) { return c; }, [](const Vec3&) { return Vec3::Zero().eval(); });
}

Mat3 VectorField::jacobian(const Vec3& x) const {
  if (jacobian_fn) return jacobian_fn(x);
  return fd_jacobian(value, x);
}

VectorField VectorField::constant(const Vec3& c) {
  return VectorField([c](const Vec3&) { return c; }, [](const Vec3&) { return Mat3::Zero().eval(); });
}

}  // namespace varflow
