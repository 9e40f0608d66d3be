#include "varflow/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace varflow::constitutive {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Fritsch-Carlson slopes with the shape-preserving three-point end rule.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto edge = [](double h0, double h1, double m0, double m1) {
    double dd = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::copysign(1.0, dd) != std::copysign(1.0, m0)) {
      dd = 0.0;
    } else if (std::copysign(1.0, m0) != std::copysign(1.0, m1) &&
               std::abs(dd) > std::abs(3.0 * m0)) {
      dd = 3.0 * m0;
    }
    return dd;
  };
  d[0] = edge(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

struct HermiteEval {
  double value;
  double d1;
  double d2;
};

HermiteEval hermite(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& s, double r) {
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(x.begin(), x.end(), r) - x.begin());
  k = std::clamp<std::size_t>(k, 1, x.size() - 1) - 1;
  const double h = x[k + 1] - x[k];
  const double t = (r - x[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double y0 = y[k];
  const double y1 = y[k + 1];
  const double m0 = h * s[k];
  const double m1 = h * s[k + 1];
  HermiteEval e;
  e.value = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
            (t3 - t2) * m1;
  e.d1 = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 +
          (3 * t2 - 2 * t) * m1) /
         h;
  e.d2 = ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) / (h * h);
  return e;
}

}  // namespace

std::string phase_name(Phase phase) {
  switch (phase) {
    case Phase::A:
      return "A";
    case Phase::B:
      return "B";
    case Phase::S:
      return "S";
  }
  return "?";
}

BarotropicLaw BarotropicLaw::gamma_law(double kappa, double gamma, Phase label) {
  if (!(kappa > 0.0)) throw ConfigError("gamma law: kappa must be positive");
  if (!(gamma > 1.0)) throw ConfigError("gamma law: gamma must exceed 1");
  return BarotropicLaw(Gamma{kappa, gamma}, 0.0, std::numeric_limits<double>::infinity(), label);
}

BarotropicLaw BarotropicLaw::quadratic(double coefficient, Phase label) {
  return BarotropicLaw(Quadratic{coefficient}, 0.0, std::numeric_limits<double>::infinity(),
                       label);
}

BarotropicLaw BarotropicLaw::linear(double c, Phase label) {
  return BarotropicLaw(Linear{c}, 0.0, std::numeric_limits<double>::infinity(), label);
}

BarotropicLaw BarotropicLaw::table(std::vector<double> rho, std::vector<double> p, Phase label) {
  if (rho.size() != p.size()) throw ConfigError("table law: column lengths differ");
  if (rho.size() < 2) throw ConfigError("table law: need at least two rows");
  for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
    if (!(rho[i + 1] > rho[i])) throw ConfigError("table law: rho must be strictly increasing");
  }
  if (rho.front() < 0.0) throw ConfigError("table law: rho must be non-negative");
  std::vector<double> slope = monotone_slopes(rho, p);
  const double lo = rho.front();
  const double hi = rho.back();
  return BarotropicLaw(Table{std::move(rho), std::move(p), std::move(slope)}, lo, hi, label);
}

BarotropicLaw BarotropicLaw::table_from_csv(const std::string& path, Phase label) {
  std::ifstream in(path);
  if (!in) throw ConfigError("table law: cannot open '" + path + "'");
  std::vector<double> rho;
  std::vector<double> p;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0;
    double b = 0.0;
    if (!(ss >> a >> b)) {
      const bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (first || blank) {
        first = false;
        continue;
      }
      throw ConfigError("table law: malformed row '" + line + "' in '" + path + "'");
    }
    first = false;
    rho.push_back(a);
    p.push_back(b);
  }
  return table(std::move(rho), std::move(p), label);
}

bool BarotropicLaw::valid(double rho) const {
  return std::isfinite(rho) && rho >= lower_ && rho <= upper_;
}

void BarotropicLaw::check(double rho) const {
  if (!valid(rho)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << kind() << " law (phase " << phase_name(label_) << "): density " << rho
        << " outside validity interval [" << lower_ << ", " << upper_ << "]";
    throw DomainError(msg.str());
  }
}

double BarotropicLaw::p(double rho) const {
  check(rho);
  return std::visit(Overloaded{
                        [&](const Gamma& g) { return g.kappa * std::pow(rho, g.gamma); },
                        [&](const Quadratic& q) { return q.a * rho * rho; },
                        [&](const Linear& l) { return l.c * rho; },
                        [&](const Table& t) { return hermite(t.x, t.y, t.slope, rho).value; },
                    },
                    repr_);
}

double BarotropicLaw::p_prime(double rho) const {
  check(rho);
  return std::visit(
      Overloaded{
          [&](const Gamma& g) { return g.kappa * g.gamma * std::pow(rho, g.gamma - 1.0); },
          [&](const Quadratic& q) { return 2.0 * q.a * rho; },
          [&](const Linear& l) { return l.c; },
          [&](const Table& t) { return hermite(t.x, t.y, t.slope, rho).d1; },
      },
      repr_);
}

double BarotropicLaw::p_second(double rho) const {
  check(rho);
  return std::visit(Overloaded{
                        [&](const Gamma& g) {
                          return g.kappa * g.gamma * (g.gamma - 1.0) * std::pow(rho, g.gamma - 2.0);
                        },
                        [&](const Quadratic& q) { return 2.0 * q.a; },
                        [&](const Linear&) { return 0.0; },
                        [&](const Table& t) { return hermite(t.x, t.y, t.slope, rho).d2; },
                    },
                    repr_);
}

double BarotropicLaw::sound_speed_squared(double rho) const { return rho * p_second(rho); }

std::string BarotropicLaw::kind() const {
  return std::visit(Overloaded{
                        [](const Gamma&) { return std::string("gamma"); },
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const Linear&) { return std::string("linear"); },
                        [](const Table&) { return std::string("table"); },
                    },
                    repr_);
}

BarotropicLaw BarotropicLaw::with_label(Phase label) const {
  BarotropicLaw copy = *this;
  copy.label_ = label;
  return copy;
}

double total_pressure(const BarotropicLaw& law, double rho) {
  return rho * law.p_prime(rho) - law.p(rho);
}

EnergyDensity energy_density(const BarotropicLaw& law, double rho, const Vec3& v) {
  return EnergyDensity{0.5 * rho * v.squaredNorm(), law.p(rho)};
}

double represented_internal_energy(const BarotropicLaw& law, double rho0, double sqrt_g) {
  if (!(sqrt_g > 0.0)) throw SingularMetricError("metric determinant must be positive");
  return law.p(rho0 / sqrt_g) * sqrt_g;
}

}  // namespace varflow::constitutive
