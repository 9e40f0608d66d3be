#include "varflow/spherical_harmonics.hpp"

#include <cmath>

namespace varflow::sh {

namespace {

struct Jet {
  double v = 0.0;
  Vec3 g = Vec3::Zero();
};

struct ComplexJet {
  Jet re;
  Jet im;
};

}  // namespace

SolidHarmonics::SolidHarmonics(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0) throw Error("SolidHarmonics: degree must be >= 0");
  const int L = max_degree;
  norm_.assign(static_cast<std::size_t>((L + 1) * (L + 1)), 1.0);
  for (int l = 0; l <= L; ++l) {
    for (int m = 1; m <= l; ++m) {
      // sqrt(2 (l-m)! / (l+m)!)
      double ratio = 1.0;
      for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
      norm_[static_cast<std::size_t>(l * (L + 1) + m)] = std::sqrt(2.0 * ratio);
    }
  }
}

HarmonicIndex SolidHarmonics::harmonic(int flat) {
  const int l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(flat))));
  return HarmonicIndex{l, flat - l * l - l};
}

void SolidHarmonics::evaluate(const Vec3& x, std::vector<double>& values) const {
  std::vector<Vec3> unused;
  evaluate(x, values, unused);
}

void SolidHarmonics::evaluate(const Vec3& x, std::vector<double>& values,
                              std::vector<Vec3>& gradients) const {
  const int L = max_degree_;
  const std::size_t stride = static_cast<std::size_t>(L + 1);
  // c[l * stride + m] = r^l P_l^m(cos theta) e^{i m phi} without the
  // Condon-Shortley phase.
  std::vector<ComplexJet> c(stride * stride);
  auto at = [&](int l, int m) -> ComplexJet& {
    return c[static_cast<std::size_t>(l) * stride + static_cast<std::size_t>(m)];
  };
  const Vec3 ex = Vec3::UnitX();
  const Vec3 ey = Vec3::UnitY();
  const Vec3 ez = Vec3::UnitZ();
  const double r2 = x.squaredNorm();
  const Vec3 grad_r2 = 2.0 * x;

  at(0, 0).re.v = 1.0;
  for (int m = 1; m <= L; ++m) {
    const ComplexJet& p = at(m - 1, m - 1);
    const double f = 2.0 * m - 1.0;
    ComplexJet& q = at(m, m);
    q.re.v = f * (p.re.v * x[0] - p.im.v * x[1]);
    q.re.g = f * (x[0] * p.re.g + p.re.v * ex - x[1] * p.im.g - p.im.v * ey);
    q.im.v = f * (p.re.v * x[1] + p.im.v * x[0]);
    q.im.g = f * (x[1] * p.re.g + p.re.v * ey + x[0] * p.im.g + p.im.v * ex);
  }
  for (int m = 0; m <= L; ++m) {
    if (m + 1 <= L) {
      const ComplexJet& p = at(m, m);
      ComplexJet& q = at(m + 1, m);
      const double f = 2.0 * m + 1.0;
      q.re.v = f * x[2] * p.re.v;
      q.re.g = f * (x[2] * p.re.g + p.re.v * ez);
      q.im.v = f * x[2] * p.im.v;
      q.im.g = f * (x[2] * p.im.g + p.im.v * ez);
    }
    for (int l = m + 2; l <= L; ++l) {
      const ComplexJet& p1 = at(l - 1, m);
      const ComplexJet& p2 = at(l - 2, m);
      ComplexJet& q = at(l, m);
      const double a = (2.0 * l - 1.0) / (l - m);
      const double b = (l + m - 1.0) / (l - m);
      auto step = [&](const Jet& j1, const Jet& j2, Jet& out) {
        out.v = a * x[2] * j1.v - b * r2 * j2.v;
        out.g = a * (x[2] * j1.g + j1.v * ez) - b * (r2 * j2.g + j2.v * grad_r2);
      };
      step(p1.re, p2.re, q.re);
      step(p1.im, p2.im, q.im);
    }
  }

  values.assign(static_cast<std::size_t>(size()), 0.0);
  gradients.assign(static_cast<std::size_t>(size()), Vec3::Zero());
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double N = norm_[static_cast<std::size_t>(l) * stride + static_cast<std::size_t>(m)];
      const ComplexJet& q = at(l, m);
      const auto ic = static_cast<std::size_t>(index(l, m));
      values[ic] = N * q.re.v;
      gradients[ic] = N * q.re.g;
      if (m > 0) {
        const auto is = static_cast<std::size_t>(index(l, -m));
        values[is] = N * q.im.v;
        gradients[is] = N * q.im.g;
      }
    }
  }
}

}  // namespace varflow::sh
