#include "suites.hpp"

namespace varflow::cli {

using constitutive::BarotropicLaw;

BarotropicLaw law_from_yaml(const YAML::Node& node, constitutive::Phase phase) {
  if (!node || !node.IsMap()) throw ConfigError("law entry must be a map with a 'kind'");
  const std::string kind = get_or<std::string>(node, "kind", "");
  if (kind == "gamma") {
    return BarotropicLaw::gamma_law(get_or(node, "kappa", 1.0), get_or(node, "gamma", 1.4), phase);
  }
  if (kind == "quadratic") return BarotropicLaw::quadratic(get_or(node, "coefficient", 1.0), phase);
  if (kind == "linear") return BarotropicLaw::linear(get_or(node, "c", 1.0), phase);
  if (kind == "table") {
    if (!node["file"]) throw ConfigError("table law needs a 'file'");
    return BarotropicLaw::table_from_csv(node["file"].as<std::string>(), phase);
  }
  throw ConfigError("unknown law kind '" + kind + "' (gamma | quadratic | linear | table)");
}

bubble::SolverConfig solver_config_from_yaml(const YAML::Node& node) {
  bubble::SolverConfig c;
  if (!node) {
    c.law_S = BarotropicLaw::gamma_law(0.3, 2.0, constitutive::Phase::S);
    return c;
  }
  c.system = bubble::system_from_name(get_or<std::string>(node, "system", "compressible-surface"));
  const YAML::Node geo = node["geometry"];
  c.R0 = get_or(geo, "R0", c.R0);
  c.R_out = get_or(geo, "Rout", c.R_out);
  const YAML::Node laws = node["laws"];
  if (laws && laws["A"]) c.law_A = law_from_yaml(laws["A"], constitutive::Phase::A);
  if (laws && laws["B"]) c.law_B = law_from_yaml(laws["B"], constitutive::Phase::B);
  if (c.system == bubble::System::CompressibleSurface) {
    c.law_S = laws && laws["S"] ? law_from_yaml(laws["S"], constitutive::Phase::S)
                                : BarotropicLaw::gamma_law(0.3, 2.0, constitutive::Phase::S);
  } else {
    if (!laws || !laws["tension"]) throw ConfigError("constant-tension system needs laws.tension");
    c.tension = constitutive::ConstantTension{laws["tension"].as<double>()};
  }
  const YAML::Node num = node["numerics"];
  c.nr_A = get_or(num, "nr_A", c.nr_A);
  c.nr_B = get_or(num, "nr_B", c.nr_B);
  c.cfl = get_or(num, "cfl", c.cfl);
  c.t_end = get_or(num, "t_end", c.t_end);
  c.output_dt = get_or(num, "output_dt", c.output_dt);
  c.validate();
  return c;
}

bubble::InitialData initial_data_from_yaml(const YAML::Node& node) {
  bubble::InitialData d;
  if (!node) return d;
  const YAML::Node init = node["init"];
  d.rho_A0 = get_or(init, "rho_A0", d.rho_A0);
  d.rho_B0 = get_or(init, "rho_B0", d.rho_B0);
  d.rho_S0 = get_or(init, "rho_S0", d.rho_S0);
  d.equilibrium = get_or(init, "equilibrium", d.equilibrium);
  d.amplitude = get_or(init, "amplitude", d.amplitude);
  d.width = get_or(init, "width", d.width);
  if (!(d.width > 0.0)) throw ConfigError("init.width must be positive");
  return d;
}

std::vector<std::pair<std::string, std::string>> suite_catalog() {
  return {
      {"verify", "surface calculus, flow-map kinematics and barotropic law invariants"},
      {"vary", "first-variation identity of the action and the single-energy variation formulas"},
      {"decompose", "gradient-plus-normal decomposition round trips and frozen interface pressure"},
      {"simulate", "spherically symmetric two-phase bubble run with conservation audit"},
  };
}

}  // namespace varflow::cli
