#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bilayer/bv1d.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/limits.hpp"

namespace bilayer {

constexpr int kScenarioSchemaVersion = 1;

enum class ConstructionKind { General, VariantI, VariantII, VariantIII, MultiJump, Parallel, BRecovery };
const char* to_string(ConstructionKind k);
ConstructionKind construction_from_string(const std::string& s);

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  ConstructionKind construction = ConstructionKind::General;
  Domain2D domain{0.0, 1.0, -1.0, 1.0};
  double lambda = 0.5;

  std::vector<RotationPiece> rotation;
  PiecewiseLinear psi_ac;
  std::vector<Jump> psi_jumps;
  std::optional<Staircase> psi_staircase;

  std::optional<double> s_angle;  // auxiliary rotation
  double rho = 0.5;

  int k_min = 5;
  int k_max = 11;
  std::optional<int> svg_k;
  std::optional<PenaltySpec> penalty;
  std::string battery = "default";

  std::string csv_path;
  std::string svg_path;
  std::vector<std::string> tables{"energies"};

  LimitDeformation limit() const;
};

// Throws ParseError on malformed input.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace bilayer
