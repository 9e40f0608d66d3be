#pragma once

// Barotropic energy densities p(rho) and the total pressure
// P(rho) = rho p'(rho) - p(rho) they induce.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "varflow/types.hpp"

namespace varflow::constitutive {

enum class Phase { A, B, S };

std::string phase_name(Phase phase);

/// Energy density law with analytic first and second derivatives.
class BarotropicLaw {
 public:
  /// kappa rho^gamma, kappa > 0, gamma > 1.
  static BarotropicLaw gamma_law(double kappa, double gamma, Phase label = Phase::A);
  /// coefficient rho^2.
  static BarotropicLaw quadratic(double coefficient = 1.0, Phase label = Phase::A);
  /// c rho; its total pressure vanishes identically.
  static BarotropicLaw linear(double c, Phase label = Phase::A);
  /// Monotone C1 cubic (Fritsch-Carlson) through (rho_i, p_i). Valid on
  /// [rho_0, rho_n]; rho must be strictly increasing.
  static BarotropicLaw table(std::vector<double> rho, std::vector<double> p,
                             Phase label = Phase::A);
  /// Two-column CSV (rho, p); a non-numeric first line is taken as header.
  static BarotropicLaw table_from_csv(const std::string& path, Phase label = Phase::A);

  double p(double rho) const;
  double p_prime(double rho) const;
  double p_second(double rho) const;
  /// Squared sound speed rho p''(rho) = d P / d rho.
  double sound_speed_squared(double rho) const;

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool valid(double rho) const;
  /// Throws DomainError when rho is outside the validity interval.
  void check(double rho) const;

  std::string kind() const;
  Phase label() const { return label_; }
  BarotropicLaw with_label(Phase label) const;

 private:
  struct Gamma {
    double kappa;
    double gamma;
  };
  struct Quadratic {
    double a;
  };
  struct Linear {
    double c;
  };
  struct Table {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> slope;
  };
  using Repr = std::variant<Gamma, Quadratic, Linear, Table>;

  BarotropicLaw(Repr repr, double lower, double upper, Phase label)
      : repr_(std::move(repr)), lower_(lower), upper_(upper), label_(label) {}

  Repr repr_;
  double lower_;
  double upper_;
  Phase label_;
};

/// Constant surface tension coefficient of the massless interface model.
struct ConstantTension {
  double p0 = 0.0;
};

struct EnergyDensity {
  double kinetic = 0.0;
  double internal = 0.0;
};

/// rho p'(rho) - p(rho).
double total_pressure(const BarotropicLaw& law, double rho);
/// (rho |v|^2 / 2, p(rho)).
EnergyDensity energy_density(const BarotropicLaw& law, double rho, const Vec3& v);
/// p(rho0 / sqrtG) sqrtG: the internal-energy integrand in reference
/// coordinates. Throws SingularMetricError for sqrtG <= 0.
double represented_internal_energy(const BarotropicLaw& law, double rho0, double sqrt_g);

}  // namespace varflow::constitutive
