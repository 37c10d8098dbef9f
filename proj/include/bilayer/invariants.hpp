#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bilayer/fields.hpp"
#include "bilayer/limits.hpp"
#include "bilayer/scenario.hpp"

namespace bilayer {

struct PropertyResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed defect
  std::string first_failure;
  bool pass() const { return instances > 0 && failures == 0; }
};

// A random construction input together with the eps it should be built at.
struct RandomInstance {
  Scenario scenario;
  double eps = 0.0;
};

RandomInstance random_instance(std::mt19937_64& rng);
// Random continuous piecewise-linear profile on (a, b) with a on the eps lattice.
BVFunction1D random_continuous_profile(std::mt19937_64& rng, double a, double b);

PropertyResult prop_decompose_roundtrip(std::uint64_t seed, std::size_t n);
PropertyResult prop_energy_identity(std::uint64_t seed, std::size_t n);
PropertyResult prop_constructions_valid(std::uint64_t seed, std::size_t n);
PropertyResult prop_rotation_tv_bound(std::uint64_t seed, std::size_t n);
PropertyResult prop_stop_go(std::uint64_t seed, std::size_t n);

std::vector<PropertyResult> run_property_suite(std::uint64_t seed, std::size_t n);

}  // namespace bilayer
