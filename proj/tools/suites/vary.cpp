#include <cmath>

#include "suites.hpp"
#include "varflow/corpus.hpp"
#include "varflow/variational.hpp"

namespace varflow::cli {

namespace {

using namespace variational;

constexpr const char* kSuite = "vary";

struct PairSpec {
  std::string configuration;
  std::string variation;
  ActionKind kind;
};

std::vector<PairSpec> pairs_from(const YAML::Node& sec) {
  std::vector<PairSpec> out;
  if (sec && sec["pairs"]) {
    for (const YAML::Node& p : sec["pairs"]) {
      out.push_back({p["configuration"].as<std::string>(), p["variation"].as<std::string>(),
                     corpus::action_kind_from_name(
                         get_or<std::string>(p, "action", "compressible-surface"))});
    }
    return out;
  }
  for (const corpus::CorpusPair& p : corpus::identity_corpus()) {
    out.push_back({p.configuration, p.variation, p.kind});
  }
  return out;
}

Record identity_record(const IdentityCheck& c, const std::string& anchor, double scale) {
  Record r = make_check(kSuite, anchor, c.test, c.dA_fd, c.rhs, c.mismatch, c.tolerance, scale);
  r.pass = r.pass && c.refines;
  r.extra = {{"richardson_error", c.richardson_error},
             {"quadrature_delta", c.quadrature_delta},
             {"coarse_mismatch", c.coarse_mismatch},
             {"bulk_A", c.terms.bulk_A},
             {"bulk_B", c.terms.bulk_B},
             {"surface", c.terms.surface},
             {"interface_A", c.terms.interface_A},
             {"interface_B", c.terms.interface_B},
             {"outer_boundary", c.terms.outer_boundary}};
  r.notes = {{"refines", c.refines ? "yes" : "no"}};
  return r;
}

struct PartCase {
  EnergyPart part;
  const char* configuration;
  const char* variation;
  double t;
};

constexpr PartCase kPartCases[] = {
    {EnergyPart::KineticA, "rotation", "general_polynomial", 0.0},
    {EnergyPart::KineticB, "swirl", "general_polynomial", 0.0},
    {EnergyPart::KineticS, "swirl", "general_polynomial", 0.0},
    {EnergyPart::InternalA, "breathing", "general_polynomial", 0.4},
    {EnergyPart::InternalB, "swirl", "general_polynomial", 0.4},
    {EnergyPart::InternalS, "breathing", "tangential_surface_slip", 0.4},
    {EnergyPart::Tension, "breathing", "normal_radial", 0.4},
};

/// Closed-form static actions: for identity flows with uniform densities the
/// kinetic parts vanish and every internal part is p(rho0) times a measure.
void static_action_checks(double s, std::vector<Record>& out) {
  const MultiphaseConfiguration c = corpus::make_configuration("static_uniform");
  const double R = c.interface_radius;
  const double Ro = c.outer_radius;
  const double T = c.horizon;
  const Vec3 probe(0.1, 0.2, 0.3);
  const double vol_A = 4.0 * kPi / 3.0 * R * R * R;
  const double vol_B = 4.0 * kPi / 3.0 * (Ro * Ro * Ro - R * R * R);
  const double area = 4.0 * kPi * R * R;
  const double bulk = c.A.law.p(c.A.rho0(probe)) * vol_A + c.B.law.p(c.B.rho0(probe)) * vol_B;
  const double surf = c.S.law->p(c.S.rho0(probe)) * area;

  const double a1 = action(c, ActionKind::CompressibleSurface).value;
  const double a2 = action(c, ActionKind::IncompressibleSurface).value;
  const double a3 = action(c, ActionKind::ConstantTension).value;
  out.push_back(relative_check(kSuite, "static_action", "compressible surface", a1,
                               -T * (bulk + surf), 1e-10, s));
  out.push_back(relative_check(kSuite, "static_action", "constant tension", a3,
                               -T * bulk + T * 0.5 * c.S.tension->p0 * area, 1e-10, s));
  out.push_back(relative_check(kSuite, "static_action", "surface internal difference", a2 - a1,
                               T * surf, 1e-10, s));
}

}  // namespace

std::vector<Record> run_vary(const SuiteContext& ctx) {
  const YAML::Node sec = ctx.config["vary"];
  const double s = ctx.tol_scale;
  const bool coarse_only = get_or<std::string>(sec, "resolution", "standard") == "coarse";
  const Discretization fine = coarse_only ? Discretization::coarse() : Discretization::standard();
  Discretization coarse = Discretization::coarse();
  if (coarse_only) {
    coarse.time_nodes = 8;
    coarse.radial_per_panel = 3;
    coarse.directions = {6, 6, {}};
    coarse.surface = {8, 8, {}};
  }

  // Admissibility first, so that a bad manifest fails before any quadrature.
  const std::vector<PairSpec> pairs = pairs_from(sec);
  std::vector<std::pair<MultiphaseConfiguration, VariationField>> built;
  for (const PairSpec& p : pairs) {
    MultiphaseConfiguration c = corpus::make_configuration(p.configuration);
    c.validate();
    VariationField v = corpus::make_variation(p.variation, c);
    v.validate(c);
    built.emplace_back(std::move(c), std::move(v));
  }

  std::vector<Record> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const IdentityCheck c =
        check_first_variation(built[i].first, built[i].second, pairs[i].kind, fine, coarse);
    out.push_back(identity_record(c, "first_variation_identity", s));
  }

  if (get_or(sec, "energy_parts", true)) {
    for (const PartCase& pc : kPartCases) {
      const MultiphaseConfiguration c = corpus::make_configuration(pc.configuration);
      const VariationField v = corpus::make_variation(pc.variation, c);
      const IdentityCheck r = check_energy_part(c, v, pc.part, pc.t, fine, coarse);
      out.push_back(identity_record(r, "energy_variation_" + energy_part_name(pc.part), s));
    }
  }

  if (get_or(sec, "structure", true)) {
    {
      const MultiphaseConfiguration c = corpus::make_configuration("swirl");
      const VariationField z = corpus::make_variation("zero", c);
      const ReferenceQuadrature q = ReferenceQuadrature::build(c, Discretization::coarse());
      const FdDerivative d =
          action_derivative_fd(c, z, ActionKind::CompressibleSurface, kDefaultLadder, q);
      out.push_back(absolute_check(kSuite, "first_variation_identity", "swirl/zero (finite difference)",
                                   d.derivative, 0.0, 1e-12, s));
      const double rhs = first_variation_rhs(c, z, ActionKind::CompressibleSurface, q).total();
      out.push_back(absolute_check(kSuite, "first_variation_identity", "swirl/zero (closed form)",
                                   rhs, 0.0, 1e-12, s));
    }
    {
      // Induced reference variations vanish at both ends of the time interval.
      double worst = 0.0;
      for (const char* cname : {"rotation", "breathing", "swirl"}) {
        const MultiphaseConfiguration c = corpus::make_configuration(cname);
        for (const char* vname :
             {"interior_bump_A", "interior_bump_B", "normal_radial", "general_polynomial",
              "tangential_surface_slip", "boundary_tangent_rotational"}) {
          const VariationField v = corpus::make_variation(vname, c);
          for (auto phase : {constitutive::Phase::A, constitutive::Phase::B, constitutive::Phase::S}) {
            for (const Vec3& xi : {Vec3(0.2, -0.3, 0.4), Vec3(0.0, 0.6, 0.8), Vec3(1.1, 0.5, -0.9)}) {
              for (double t : {0.0, c.horizon}) {
                worst = std::max(worst,
                                 induced_reference_variation(c, v, phase, xi, t).norm());
              }
            }
          }
        }
      }
      out.push_back(make_check(kSuite, "variation_endpoint_vanishing",
                               "corpus variations at t = 0 and t = T", worst, 0.0, worst, 1e-12, s));
    }
    {
      // Separate interface terms against the combined normal statement.
      const MultiphaseConfiguration c = corpus::make_configuration("breathing");
      const VariationField v = corpus::make_variation("normal_radial", c);
      const ReferenceQuadrature q = ReferenceQuadrature::build(c, Discretization::coarse());
      const FirstVariationTerms t = first_variation_rhs(c, v, ActionKind::CompressibleSurface, q);
      out.push_back(relative_check(kSuite, "interface_terms_combined", "breathing/normal_radial",
                                   t.interface_A + t.interface_B, t.interface_combined, 1e-12, s));
    }
    static_action_checks(s, out);
    {
      const MultiphaseConfiguration eq = corpus::make_configuration("equilibrium");
      const EulerLagrangeReport r =
          euler_lagrange_residuals(eq, ActionKind::CompressibleSurface, 0.3);
      const double worst = std::max({r.momentum_A, r.momentum_B, r.momentum_S, r.continuity_A,
                                     r.continuity_B, r.continuity_S});
      out.push_back(make_check(kSuite, "euler_lagrange_residual", "equilibrium, compressible surface",
                               worst, 0.0, worst, 1e-8, s));
      const MultiphaseConfiguration et = corpus::make_configuration("equilibrium_tension");
      const EulerLagrangeReport rt = euler_lagrange_residuals(et, ActionKind::ConstantTension, 0.3);
      const double wt = std::max({rt.momentum_A, rt.momentum_B, rt.momentum_S});
      out.push_back(make_check(kSuite, "euler_lagrange_residual", "equilibrium, constant tension",
                               wt, 0.0, wt, 1e-8, s));
    }
  }
  return out;
}

}  // namespace varflow::cli
