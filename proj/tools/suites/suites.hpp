#pragma once

// Check suites behind the command-line subcommands. Each suite reads its own
// section of the YAML manifest and returns records in a fixed order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "report.hpp"
#include "varflow/bubble.hpp"

namespace varflow::cli {

struct SuiteContext {
  YAML::Node config;  // the whole manifest
  std::uint64_t seed = 1;
  double tol_scale = 1.0;
  std::filesystem::path out_dir;
};

std::vector<Record> run_verify(const SuiteContext& ctx);
std::vector<Record> run_vary(const SuiteContext& ctx);
std::vector<Record> run_decompose(const SuiteContext& ctx);
/// Also writes timeseries.csv and the final radial profiles into out_dir.
std::vector<Record> run_simulate(const SuiteContext& ctx);

/// Suite names with one line of description each.
std::vector<std::pair<std::string, std::string>> suite_catalog();

// -- manifest helpers ------------------------------------------------------------

/// {kind: gamma, kappa, gamma} | {kind: quadratic, coefficient} |
/// {kind: linear, c} | {kind: table, file}. Throws ConfigError.
constitutive::BarotropicLaw law_from_yaml(const YAML::Node& node, constitutive::Phase phase);

/// The simulate section: geometry, laws, init, numerics, system.
bubble::SolverConfig solver_config_from_yaml(const YAML::Node& node);
bubble::InitialData initial_data_from_yaml(const YAML::Node& node);

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node || !node[key]) return fallback;
  return node[key].as<T>();
}

}  // namespace varflow::cli
