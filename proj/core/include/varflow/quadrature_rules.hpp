#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace varflow {

/// One-dimensional quadrature rule on an interval.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with n nodes mapped to [a, b]. Nodes ascend.
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `per_panel` nodes on each [breaks[i], breaks[i+1]].
Rule1D composite_gauss_legendre(std::span<const double> breaks, int per_panel);

/// Periodic trapezoid rule on [a, a + period) with n equispaced nodes.
Rule1D periodic_trapezoid(int n, double a, double period);

/// Neumaier-compensated accumulator; summation order is the call order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace varflow
