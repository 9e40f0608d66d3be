#include "varflow/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "varflow/quadrature_rules.hpp"

namespace varflow::bubble {

using constitutive::total_pressure;

namespace {

constexpr double kFourPi = 4.0 * kPi;

double shell_volume(double a, double b) { return kFourPi / 3.0 * (b * b * b - a * a * a); }

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

double sound_speed(const BarotropicLaw& law, double rho) {
  return std::sqrt(std::max(0.0, law.sound_speed_squared(rho)));
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Primitive {
  std::vector<double> rho;
  std::vector<double> u;
};

Primitive primitives(const std::vector<double>& mass, const std::vector<double>& mom,
                     const std::vector<double>& edges, const char* phase) {
  Primitive p;
  const std::size_t n = mass.size();
  p.rho.resize(n);
  p.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double V = shell_volume(edges[i], edges[i + 1]);
    if (!(mass[i] > 0.0) || !(V > 0.0)) {
      throw DomainError(std::string("vacuum cell ") + std::to_string(i) + " in phase " + phase);
    }
    p.rho[i] = mass[i] / V;
    p.u[i] = mom[i] / mass[i];
  }
  return p;
}

/// Face values of a cell quantity with minmod slopes; the ghost values on
/// each side close the stencil.
void reconstruct(const std::vector<double>& q, double ghost_left, double ghost_right,
                 std::vector<double>& left_face, std::vector<double>& right_face) {
  const std::size_t n = q.size();
  left_face.resize(n);
  right_face.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double qm = i == 0 ? ghost_left : q[i - 1];
    const double qp = i + 1 == n ? ghost_right : q[i + 1];
    const double slope = minmod(q[i] - qm, qp - q[i]);
    left_face[i] = q[i] - 0.5 * slope;
    right_face[i] = q[i] + 0.5 * slope;
  }
}

struct FaceFlux {
  double mass = 0.0;
  double momentum = 0.0;
};

FaceFlux rusanov(const BarotropicLaw& law, double rl, double ul, double rr, double ur, double w) {
  const double pl = total_pressure(law, rl);
  const double pr = total_pressure(law, rr);
  const double a = std::max(std::abs(ul - w) + sound_speed(law, rl),
                            std::abs(ur - w) + sound_speed(law, rr));
  FaceFlux f;
  f.mass = 0.5 * (rl * (ul - w) + rr * (ur - w)) - 0.5 * a * (rr - rl);
  f.momentum = 0.5 * (rl * ul * (ul - w) + pl + rr * ur * (ur - w) + pr) - 0.5 * a * (rr * ur - rl * ul);
  return f;
}

/// Momentum flux through a wall moving with speed w when the fluid state
/// (rho, u) lies on the side given by `fluid_left`: the Rusanov flux against
/// the mirrored ghost state, with zero mass flux.
double wall_pressure(const BarotropicLaw& law, double rho, double u, double w, bool fluid_left) {
  const double d = u - w;
  const double c = sound_speed(law, rho);
  const double p = total_pressure(law, rho);
  return fluid_left ? p + rho * d * (d + std::abs(d) + c) : p + rho * d * (d - std::abs(d) - c);
}

/// Flat layout [M_A, P_A, M_B, P_B, R, Rdot] used by the integrator.
std::vector<double> pack(const RadialTwoPhaseState& s) {
  std::vector<double> y;
  y.reserve(2 * (s.mass_A.size() + s.mass_B.size()) + 2);
  y.insert(y.end(), s.mass_A.begin(), s.mass_A.end());
  y.insert(y.end(), s.momentum_A.begin(), s.momentum_A.end());
  y.insert(y.end(), s.mass_B.begin(), s.mass_B.end());
  y.insert(y.end(), s.momentum_B.begin(), s.momentum_B.end());
  y.push_back(s.R);
  y.push_back(s.Rdot);
  return y;
}

std::vector<double> pack(const StateDerivative& d) {
  std::vector<double> y;
  y.insert(y.end(), d.mass_A.begin(), d.mass_A.end());
  y.insert(y.end(), d.momentum_A.begin(), d.momentum_A.end());
  y.insert(y.end(), d.mass_B.begin(), d.mass_B.end());
  y.insert(y.end(), d.momentum_B.begin(), d.momentum_B.end());
  y.push_back(d.R);
  y.push_back(d.Rdot);
  return y;
}

RadialTwoPhaseState unpack(const std::vector<double>& y, const RadialTwoPhaseState& shape) {
  RadialTwoPhaseState s = shape;
  const auto na = static_cast<std::ptrdiff_t>(shape.mass_A.size());
  const auto nb = static_cast<std::ptrdiff_t>(shape.mass_B.size());
  auto it = y.begin();
  s.mass_A.assign(it, it + na);
  it += na;
  s.momentum_A.assign(it, it + na);
  it += na;
  s.mass_B.assign(it, it + nb);
  it += nb;
  s.momentum_B.assign(it, it + nb);
  it += nb;
  s.R = *it++;
  s.Rdot = *it;
  return s;
}

double surface_total_pressure(const SolverConfig& c, double rho_S) {
  if (c.system == System::ConstantTension) return c.tension->p0;
  return total_pressure(*c.law_S, rho_S);
}

/// Inverts the total pressure of a law on [lo, hi] by bisection refined with
/// Newton steps; the total pressure is increasing for convex laws.
double invert_total_pressure(const BarotropicLaw& law, double target) {
  double lo = std::max(law.lower(), 1e-300);
  double hi = std::isfinite(law.upper()) ? law.upper() : 1.0;
  if (!std::isfinite(law.upper())) {
    while (total_pressure(law, hi) < target && hi < 1e12) hi *= 2.0;
  }
  if (total_pressure(law, lo) > target || total_pressure(law, hi) < target) {
    throw DomainError("no density realizes total pressure " + num(target));
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = total_pressure(law, x) - target;
    if (f == 0.0) return x;
    (f > 0.0 ? hi : lo) = x;
    const double df = law.sound_speed_squared(x);
    double next = df > 0.0 ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * 2.2e-16 * x) return next;
    x = next;
  }
  return x;
}

}  // namespace

std::string system_name(System system) {
  return system == System::CompressibleSurface ? "compressible-surface" : "constant-tension";
}

System system_from_name(const std::string& name) {
  if (name == "compressible-surface") return System::CompressibleSurface;
  if (name == "constant-tension") return System::ConstantTension;
  throw ConfigError("unknown system '" + name + "' (compressible-surface | constant-tension)");
}

void SolverConfig::validate() const {
  if (!(R0 > 0.0 && R_out > R0)) throw ConfigError("need 0 < R0 < Rout");
  if (nr_A < 16 || nr_B < 16) throw ConfigError("radial resolutions must be at least 16");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  if (!(output_dt > 0.0)) throw ConfigError("output_dt must be positive");
  if (system == System::CompressibleSurface && !law_S) {
    throw ConfigError("compressible-surface system needs a surface law");
  }
  if (system == System::ConstantTension && !tension) {
    throw ConfigError("constant-tension system needs a tension p0");
  }
}

double RadialTwoPhaseState::rho_S() const { return surface_mass / (kFourPi * R * R); }

double balanced_inner_density(const SolverConfig& config, double rho_B, double rho_S) {
  const double pB = total_pressure(config.law_B, rho_B);
  const double pS = surface_total_pressure(config, rho_S);
  return invert_total_pressure(config.law_A, pB - 2.0 * pS / config.R0);
}

std::vector<double> edges_A(const SolverConfig& config, double R) {
  std::vector<double> e(static_cast<std::size_t>(config.nr_A) + 1);
  for (int j = 0; j <= config.nr_A; ++j) e[static_cast<std::size_t>(j)] = R * j / config.nr_A;
  return e;
}

std::vector<double> edges_B(const SolverConfig& config, double R) {
  std::vector<double> e(static_cast<std::size_t>(config.nr_B) + 1);
  for (int j = 0; j <= config.nr_B; ++j) {
    e[static_cast<std::size_t>(j)] = R + (config.R_out - R) * j / config.nr_B;
  }
  e.back() = config.R_out;
  return e;
}

RadialTwoPhaseState initial_state(const SolverConfig& config, const InitialData& init) {
  config.validate();
  RadialTwoPhaseState s;
  s.R = config.R0;
  const double rho_S = config.system == System::ConstantTension ? 0.0 : init.rho_S0;
  if (config.system == System::CompressibleSurface && !(rho_S > 0.0)) {
    throw ConfigError("compressible-surface system needs rho_S0 > 0");
  }
  s.surface_mass = kFourPi * s.R * s.R * rho_S;
  const double rho_A0 = init.equilibrium ? balanced_inner_density(config, init.rho_B0, rho_S)
                                         : init.rho_A0;
  const Rule1D g = gauss_legendre(4, 0.0, 1.0);
  auto cell_mass = [&](double a, double b, auto&& rho) {
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double r = a + (b - a) * g.nodes[k];
      m += (b - a) * g.weights[k] * rho(r) * kFourPi * r * r;
    }
    return m;
  };
  const auto ea = edges_A(config, s.R);
  const auto eb = edges_B(config, s.R);
  auto rho_A = [&](double r) {
    return rho_A0 * (1.0 + init.amplitude * std::exp(-(r * r) / (init.width * init.width)));
  };
  for (int i = 0; i < config.nr_A; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    s.mass_A.push_back(init.amplitude == 0.0 ? rho_A0 * shell_volume(ea[iu], ea[iu + 1])
                                             : cell_mass(ea[iu], ea[iu + 1], rho_A));
  }
  for (int i = 0; i < config.nr_B; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    s.mass_B.push_back(init.rho_B0 * shell_volume(eb[iu], eb[iu + 1]));
  }
  s.momentum_A.assign(s.mass_A.size(), 0.0);
  s.momentum_B.assign(s.mass_B.size(), 0.0);
  return s;
}

namespace {

CellProfile make_profile(const std::vector<double>& mass, const std::vector<double>& mom,
                         const std::vector<double>& e, const BarotropicLaw& law,
                         const char* phase) {
  const Primitive p = primitives(mass, mom, e, phase);
  CellProfile out;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    out.r.push_back(0.5 * (e[i] + e[i + 1]));
    out.rho.push_back(p.rho[i]);
    out.u.push_back(p.u[i]);
    out.pressure.push_back(total_pressure(law, p.rho[i]));
  }
  return out;
}

}  // namespace

CellProfile profile_A(const RadialTwoPhaseState& s, const SolverConfig& config) {
  return make_profile(s.mass_A, s.momentum_A, edges_A(config, s.R), config.law_A, "A");
}

CellProfile profile_B(const RadialTwoPhaseState& s, const SolverConfig& config) {
  return make_profile(s.mass_B, s.momentum_B, edges_B(config, s.R), config.law_B, "B");
}

double StateDerivative::max_abs() const {
  double m = std::max(std::abs(R), std::abs(Rdot));
  for (const auto* v : {&mass_A, &momentum_A, &mass_B, &momentum_B}) {
    for (double x : *v) m = std::max(m, std::abs(x));
  }
  return m;
}

StateDerivative radial_rhs(const RadialTwoPhaseState& s, const SolverConfig& config) {
  if (!(s.R > 0.0 && s.R < config.R_out)) {
    throw DomainError("interface radius " + num(s.R) + " left (0, R_out)");
  }
  const auto ea = edges_A(config, s.R);
  const auto eb = edges_B(config, s.R);
  const Primitive pa = primitives(s.mass_A, s.momentum_A, ea, "A");
  const Primitive pb = primitives(s.mass_B, s.momentum_B, eb, "B");
  const std::size_t na = pa.rho.size();
  const std::size_t nb = pb.rho.size();

  // Interface speed: the state variable for a massive interface, the solution
  // of the linearized pressure-jump problem for a massless one.
  double V = s.Rdot;
  double pA_wall = 0.0;
  double pB_wall = 0.0;
  const bool massless = config.system == System::ConstantTension;
  if (massless) {
    const double rl = pa.rho[na - 1];
    const double ul = pa.u[na - 1];
    const double rr = pb.rho[0];
    const double ur = pb.u[0];
    const double zl = rl * sound_speed(config.law_A, rl);
    const double zr = rr * sound_speed(config.law_B, rr);
    const double pl = total_pressure(config.law_A, rl);
    const double pr = total_pressure(config.law_B, rr);
    const double jump = -2.0 * config.tension->p0 / s.R;  // P_A - P_B at the interface
    V = (pl - pr - jump + zl * ul + zr * ur) / (zl + zr);
    pA_wall = pl + zl * (ul - V);
    pB_wall = pA_wall - jump;
  }

  StateDerivative d;
  d.interface_speed = V;

  // Phase A: reflective ghost at r = 0, moving wall at R.
  {
    std::vector<double> rl, rr, ul, ur;
    reconstruct(pa.rho, pa.rho[0], pa.rho[na - 1], rl, rr);
    reconstruct(pa.u, -pa.u[0], 2.0 * V - pa.u[na - 1], ul, ur);
    std::vector<FaceFlux> flux(na + 1);
    for (std::size_t j = 1; j < na; ++j) {
      const double w = V * static_cast<double>(j) / static_cast<double>(na);
      flux[j] = rusanov(config.law_A, rr[j - 1], ur[j - 1], rl[j], ul[j], w);
    }
    if (!massless) pA_wall = wall_pressure(config.law_A, rr[na - 1], ur[na - 1], V, true);
    flux[na].momentum = pA_wall;
    d.mass_A.resize(na);
    d.momentum_A.resize(na);
    for (std::size_t i = 0; i < na; ++i) {
      const double aL = kFourPi * ea[i] * ea[i];
      const double aR = kFourPi * ea[i + 1] * ea[i + 1];
      const double p = total_pressure(config.law_A, pa.rho[i]);
      d.mass_A[i] = -(aR * flux[i + 1].mass - aL * flux[i].mass);
      d.momentum_A[i] = -(aR * (flux[i + 1].momentum - p) - aL * (flux[i].momentum - p));
    }
  }
  // Phase B: moving wall at R, fixed wall at R_out.
  {
    std::vector<double> rl, rr, ul, ur;
    reconstruct(pb.rho, pb.rho[0], pb.rho[nb - 1], rl, rr);
    reconstruct(pb.u, 2.0 * V - pb.u[0], -pb.u[nb - 1], ul, ur);
    std::vector<FaceFlux> flux(nb + 1);
    if (!massless) pB_wall = wall_pressure(config.law_B, rl[0], ul[0], V, false);
    flux[0].momentum = pB_wall;
    for (std::size_t j = 1; j < nb; ++j) {
      const double w = V * (1.0 - static_cast<double>(j) / static_cast<double>(nb));
      flux[j] = rusanov(config.law_B, rr[j - 1], ur[j - 1], rl[j], ul[j], w);
    }
    flux[nb].momentum = wall_pressure(config.law_B, rr[nb - 1], ur[nb - 1], 0.0, true);
    d.mass_B.resize(nb);
    d.momentum_B.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      const double aL = kFourPi * eb[i] * eb[i];
      const double aR = kFourPi * eb[i + 1] * eb[i + 1];
      const double p = total_pressure(config.law_B, pb.rho[i]);
      d.mass_B[i] = -(aR * flux[i + 1].mass - aL * flux[i].mass);
      d.momentum_B[i] = -(aR * (flux[i + 1].momentum - p) - aL * (flux[i].momentum - p));
    }
  }

  d.pressure_A = pA_wall;
  d.pressure_B = pB_wall;
  d.R = V;
  if (massless) {
    d.Rdot = 0.0;
  } else {
    const double rho_S = s.rho_S();
    const double pS = total_pressure(*config.law_S, rho_S);
    d.Rdot = (2.0 * pS / s.R - (pB_wall - pA_wall)) / rho_S;
  }
  return d;
}

double stable_dt(const RadialTwoPhaseState& s, const SolverConfig& config) {
  const auto ea = edges_A(config, s.R);
  const auto eb = edges_B(config, s.R);
  const Primitive pa = primitives(s.mass_A, s.momentum_A, ea, "A");
  const Primitive pb = primitives(s.mass_B, s.momentum_B, eb, "B");
  const double speed = std::abs(s.Rdot);
  double sa = 0.0;
  for (std::size_t i = 0; i < pa.rho.size(); ++i) {
    sa = std::max(sa, std::abs(pa.u[i]) + speed + sound_speed(config.law_A, pa.rho[i]));
  }
  double sb = 0.0;
  for (std::size_t i = 0; i < pb.rho.size(); ++i) {
    sb = std::max(sb, std::abs(pb.u[i]) + speed + sound_speed(config.law_B, pb.rho[i]));
  }
  double dt = std::min(config.cfl * (ea[1] - ea[0]) / sa, config.cfl * (eb[1] - eb[0]) / sb);
  if (config.system == System::CompressibleSurface) {
    // The wall pressures damp the interface at rate (Z_A + Z_B) / rho_S.
    const double za = pa.rho.back() * sound_speed(config.law_A, pa.rho.back());
    const double zb = pb.rho.front() * sound_speed(config.law_B, pb.rho.front());
    dt = std::min(dt, config.cfl * 2.5 * s.rho_S() / (za + zb));
  }
  return dt;
}

RadialTwoPhaseState step(const RadialTwoPhaseState& s, const SolverConfig& config, double dt) {
  if (dt == 0.0) return s;
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const double limit = stable_dt(s, config);
  if (dt > limit * (1.0 + 1e-12)) {
    throw CflViolationError("dt = " + num(dt) + " exceeds the CFL limit " + num(limit));
  }
  const std::vector<double> y0 = pack(s);
  auto f = [&](const std::vector<double>& y) {
    RadialTwoPhaseState st = unpack(y, s);
    const StateDerivative d = radial_rhs(st, config);
    return std::make_pair(pack(d), d.interface_speed);
  };
  auto axpy = [](const std::vector<double>& y, double a, const std::vector<double>& k) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
    return out;
  };
  const auto [k1, v1] = f(y0);
  const auto [k2, v2] = f(axpy(y0, 0.5 * dt, k1));
  const auto [k3, v3] = f(axpy(y0, 0.5 * dt, k2));
  const auto [k4, v4] = f(axpy(y0, dt, k3));
  std::vector<double> y(y0.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  RadialTwoPhaseState out = unpack(y, s);
  out.t = s.t + dt;
  if (!(out.R > 0.0 && out.R < config.R_out)) {
    throw InvariantError("interface radius " + num(out.R) + " left (0, R_out) at t = " +
                         num(out.t));
  }
  for (const auto* m : {&out.mass_A, &out.mass_B}) {
    for (double x : *m) {
      if (!(x > 0.0)) throw InvariantError("non-positive cell mass at t = " + num(out.t));
    }
  }
  if (config.system == System::ConstantTension) {
    out.Rdot = radial_rhs(out, config).interface_speed;
  }
  return out;
}

ConservationRecord measure(const RadialTwoPhaseState& s, const SolverConfig& config) {
  ConservationRecord r;
  r.t = s.t;
  r.R = s.R;
  r.Rdot = s.Rdot;
  r.rho_S = s.rho_S();
  CompensatedSum ma;
  CompensatedSum mb;
  CompensatedSum kin;
  CompensatedSum internal;
  CompensatedSum radial_momentum;
  const auto ea = edges_A(config, s.R);
  const auto eb = edges_B(config, s.R);
  for (std::size_t i = 0; i < s.mass_A.size(); ++i) {
    const double V = shell_volume(ea[i], ea[i + 1]);
    ma += s.mass_A[i];
    kin += 0.5 * s.momentum_A[i] * s.momentum_A[i] / s.mass_A[i];
    internal += config.law_A.p(s.mass_A[i] / V) * V;
    radial_momentum += s.momentum_A[i];
  }
  for (std::size_t i = 0; i < s.mass_B.size(); ++i) {
    const double V = shell_volume(eb[i], eb[i + 1]);
    mb += s.mass_B[i];
    kin += 0.5 * s.momentum_B[i] * s.momentum_B[i] / s.mass_B[i];
    internal += config.law_B.p(s.mass_B[i] / V) * V;
    radial_momentum += s.momentum_B[i];
  }
  const double area = kFourPi * s.R * s.R;
  if (config.system == System::CompressibleSurface) {
    kin += 0.5 * s.surface_mass * s.Rdot * s.Rdot;
    internal += config.law_S->p(r.rho_S) * area;
    r.surface_pressure = total_pressure(*config.law_S, r.rho_S);
    radial_momentum += s.surface_mass * s.Rdot;
  } else {
    internal += -config.tension->p0 * area;
    r.surface_pressure = config.tension->p0;
  }
  r.mass_A = ma.value();
  r.mass_B = mb.value();
  r.mass_S = s.surface_mass;
  r.mass_total = r.mass_A + r.mass_B + r.mass_S;
  // Total momentum vector: the radial momentum density integrated against
  // the unit normal over directions.
  static const geometry::SurfaceQuadrature dirs =
      geometry::make_quadrature(geometry::ChartAtlas::sphere(1.0), {16, 16, {}});
  Vec3 nsum = Vec3::Zero();
  for (std::size_t k = 0; k < dirs.size(); ++k) nsum += dirs.weights[k] * dirs.nodes[k].position;
  r.momentum = (radial_momentum.value() / kFourPi * nsum).norm();
  r.energy_kinetic = kin.value();
  r.energy_internal = internal.value();
  r.energy_total = r.energy_kinetic + r.energy_internal;
  return r;
}

Trajectory simulate(const SolverConfig& config, const RadialTwoPhaseState& initial) {
  config.validate();
  Trajectory tr;
  RadialTwoPhaseState s = initial;
  tr.records.push_back(measure(s, config));
  const long n_out = static_cast<long>(std::ceil(config.t_end / config.output_dt - 1e-9));
  double last_sign = tr.records.back().surface_pressure;
  for (long k = 1; k <= n_out; ++k) {
    const double target = std::min(config.t_end, initial.t + static_cast<double>(k) * config.output_dt);
    while (s.t < target) {
      double dt = stable_dt(s, config);
      if (s.t + dt >= target || target - (s.t + dt) < 1e-12 * std::max(1.0, target)) {
        dt = target - s.t;
      }
      s = step(s, config, dt);
      if (target - s.t < 1e-14 * std::max(1.0, target)) s.t = target;
      ++tr.steps;
      if (config.system == System::CompressibleSurface) {
        const double pS = total_pressure(*config.law_S, s.rho_S());
        if ((pS < 0.0) != (last_sign < 0.0)) tr.surface_pressure_sign_changes.push_back(s.t);
        last_sign = pS;
      }
    }
    tr.records.push_back(measure(s, config));
  }
  tr.final_state = s;
  return tr;
}

ConservationReport conservation_report(const std::vector<ConservationRecord>& records) {
  ConservationReport rep;
  rep.momentum_note =
      "outer boundary term of the momentum balance integrates the pressure against n over the "
      "whole sphere and vanishes by symmetry";
  if (records.empty()) return rep;
  const ConservationRecord& r0 = records.front();
  auto rel = [](double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); };
  for (const ConservationRecord& r : records) {
    rep.mass_drift = std::max(rep.mass_drift, rel(r.mass_total, r0.mass_total));
    rep.mass_A_drift = std::max(rep.mass_A_drift, rel(r.mass_A, r0.mass_A));
    rep.mass_B_drift = std::max(rep.mass_B_drift, rel(r.mass_B, r0.mass_B));
    rep.surface_mass_drift = std::max(
        rep.surface_mass_drift, rel(kFourPi * r.R * r.R * r.rho_S, kFourPi * r0.R * r0.R * r0.rho_S));
    rep.energy_drift = std::max(rep.energy_drift, rel(r.energy_total, r0.energy_total));
    rep.max_momentum = std::max(rep.max_momentum, r.momentum);
  }
  return rep;
}

void write_timeseries_csv(std::ostream& os, const std::vector<ConservationRecord>& records) {
  const auto old = os.precision(17);
  os << "t,R,Rdot,rho_S,mass_total,mass_A,mass_B,energy_kinetic,energy_internal,energy_total\n";
  for (const ConservationRecord& r : records) {
    os << r.t << ',' << r.R << ',' << r.Rdot << ',' << r.rho_S << ',' << r.mass_total << ','
       << r.mass_A << ',' << r.mass_B << ',' << r.energy_kinetic << ',' << r.energy_internal << ','
       << r.energy_total << '\n';
  }
  os.precision(old);
}

void write_profile_csv(std::ostream& os, const CellProfile& p) {
  const auto old = os.precision(17);
  os << "r,rho,u,pressure\n";
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    os << p.r[i] << ',' << p.rho[i] << ',' << p.u[i] << ',' << p.pressure[i] << '\n';
  }
  os.precision(old);
}

FrozenSurfaceReport frozen_incompressible_residual(const RadialTwoPhaseState& s,
                                                   const SolverConfig& config,
                                                   const VectorField& surface_velocity,
                                                   const ScalarField& surface_density,
                                                   bool strict, int max_degree) {
  const helmholtz::SphereDecomposer dec(helmholtz::Sphere{Vec3::Zero(), s.R}, max_degree);
  const StateDerivative d = radial_rhs(s, config);
  const double pA = d.pressure_A;
  const double pB = d.pressure_B;
  FrozenSurfaceReport rep;
  const auto& quad = dec.quadrature();
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const Vec3& x = quad.nodes[i].position;
    const Vec3 n = x.normalized();
    const Mat3 P = Mat3::Identity() - n * n.transpose();
    const Mat3 Jv = surface_velocity.jacobian(x);
    const double div = P.cwiseProduct(Jv).sum();
    rep.max_surface_divergence = std::max(rep.max_surface_divergence, std::abs(div));
    const Vec3 grad_rho = P * surface_density.gradient(x);
    rep.surface_continuity =
        std::max(rep.surface_continuity,
                 std::abs(surface_velocity(x).dot(grad_rho) + surface_density(x) * div));
  }
  helmholtz::FrozenInterface state;
  state.surface_density = [&](const Vec3& x) { return surface_density(x); };
  // Material derivative of the steady field along itself.
  state.surface_acceleration = [&](const Vec3& x) -> Vec3 {
    return surface_velocity.jacobian(x) * surface_velocity(x);
  };
  state.pressure_inside = [pA](const Vec3&) { return pA; };
  state.pressure_outside = [pB](const Vec3&) { return pB; };
  const helmholtz::SurfaceField load = [&](const geometry::SurfacePoint& p) -> Vec3 {
    const Vec3& x = p.position;
    return (pA - pB) * x.normalized() - state.surface_density(x) * state.surface_acceleration(x);
  };
  helmholtz::SurfacePotential pot =
      strict ? helmholtz::incompressible_surface_pressure(dec, state) : dec.fit(load);
  if (!strict) pot.defect = dec.orthogonality_defect(load, max_degree);
  rep.orthogonality_defect = pot.defect;
  rep.momentum_residual = pot.residual;
  CompensatedSum mean;
  CompensatedSum area;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    mean += quad.weights[i] * pot(quad.nodes[i].position);
    area += quad.weights[i];
  }
  rep.mean_pressure = mean.value() / area.value();
  rep.coefficients = pot.coefficients();
  return rep;
}

}  // namespace varflow::bubble
