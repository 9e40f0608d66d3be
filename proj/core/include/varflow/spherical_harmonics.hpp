#pragma once

// Real Schmidt semi-normalized spherical harmonics, evaluated as solid
// harmonics (homogeneous harmonic polynomials) together with their ambient
// gradients. On the unit sphere degree 1 gives x3, x1, x2.

#include <vector>

#include "varflow/types.hpp"

namespace varflow::sh {

/// order >= 0 selects the cosine part, order < 0 the sine part of |order|.
struct HarmonicIndex {
  int degree = 0;
  int order = 0;
};

class SolidHarmonics {
 public:
  explicit SolidHarmonics(int max_degree);

  int max_degree() const { return max_degree_; }
  /// (L + 1)^2.
  int size() const { return (max_degree_ + 1) * (max_degree_ + 1); }
  /// Flat position of (l, m): l^2 + l + m.
  static int index(int degree, int order) { return degree * degree + degree + order; }
  static HarmonicIndex harmonic(int flat);

  /// Values of all harmonics at x (homogeneous of degree l in x).
  void evaluate(const Vec3& x, std::vector<double>& values) const;
  /// Values and ambient gradients.
  void evaluate(const Vec3& x, std::vector<double>& values, std::vector<Vec3>& gradients) const;

 private:
  int max_degree_;
  std::vector<double> norm_;  // Schmidt factors per (l, |m|)
};

}  // namespace varflow::sh
