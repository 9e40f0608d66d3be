#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace varflow {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat2 = Eigen::Matrix2d;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A chart Jacobian lost rank at the requested point.
class SingularChartError : public Error {
 public:
  using Error::Error;
};

/// A flow-map Jacobian (or its metric determinant) is not positive.
class SingularMetricError : public Error {
 public:
  using Error::Error;
};

/// A density or state lies outside the validity interval of a law.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A variation or configuration violates an admissibility constraint.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// A surface field fails the orthogonality hypothesis of the
/// gradient-plus-normal decomposition.
class HypothesisViolatedError : public Error {
 public:
  using Error::Error;
};

/// The decomposition needs nonvanishing mean curvature.
class CurvatureDegenerateError : public Error {
 public:
  using Error::Error;
};

/// Explicit step too large for the current characteristic speed.
class CflViolationError : public Error {
 public:
  using Error::Error;
};

/// A solver invariant broke (vacuum cell, interface left the domain, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace varflow
