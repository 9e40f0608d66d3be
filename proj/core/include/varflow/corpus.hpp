#pragma once

// Named configurations and variation fields used by the test suites and the
// command-line driver.

#include <string>
#include <vector>

#include "varflow/variational.hpp"

namespace varflow::corpus {

using variational::ActionKind;
using variational::MultiphaseConfiguration;
using variational::VariationField;

/// static_uniform, static_nonuniform, rotation, breathing, swirl,
/// equilibrium, equilibrium_tension.
std::vector<std::string> configuration_names();
MultiphaseConfiguration make_configuration(const std::string& name);

/// interior_bump_A, interior_bump_B, normal_radial,
/// boundary_tangent_rotational, tangential_surface_slip, general_polynomial,
/// zero, radial_surface_only (violates normal matching).
std::vector<std::string> variation_names();
VariationField make_variation(const std::string& name, const MultiphaseConfiguration& config);

struct CorpusPair {
  std::string configuration;
  std::string variation;
  ActionKind kind;
};

/// The pairs checked against the first-variation identity.
std::vector<CorpusPair> identity_corpus();

ActionKind action_kind_from_name(const std::string& name);

}  // namespace varflow::corpus
