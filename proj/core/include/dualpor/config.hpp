#pragma once

// Scenario files (YAML). Pressures are given in bar, times in days;
// everything is converted to SI on load.
//
// Block comparison scenario:
//
//   scenario: sim1
//   dimension: 2
//   deltas: [0.01, 0.001]
//   horizon_days: 10
//   steps: 1000
//   methods: [nlin, clin, vlin]
//   output_dir: out/sim1
//   matrix:   {porosity: 0.35, permeability: 1.0e-13, p_r_bar: 1.0, n: 2}
//   fracture: {porosity: 0.01, permeability: 1.0e-13, p_r_bar: 0.1, n: 2}
//   fluids:   {mu_w: 1.0e-3, mu_n: 2.0e-3}
//   boundary: {kind: ramp, start: 0.05, rate_per_day: 0.1, rise: 0.9}
//   mesh:     {cells_per_axis: 64, kappa: 0.5, q: 0.3, symmetry: full}
//
// Effective reservoir scenario: the same media blocks plus an `effective`
// section (see EffectiveScenario).

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualpor/constitutive.hpp"
#include "dualpor/fvsolver.hpp"
#include "dualpor/imbibition.hpp"
#include "dualpor/trajectory.hpp"

namespace dualpor {

struct ScenarioConfig {
  std::string id = "custom";
  ConstitutiveSet constitutive;
  std::vector<double> deltas{1.0e-2};
  int dimension = 2;
  BoundaryTrajectory trajectory = BoundaryTrajectory::ramp(0.05, 0.1, 0.9);
  double horizon_days = 10.0;
  std::size_t steps = 1000;
  BlockDiscretization mesh;
  std::vector<ExchangeMethod> methods{ExchangeMethod::Nonlinear, ExchangeMethod::ConstantLinear,
                                      ExchangeMethod::VariableLinear};
  std::string output_dir = "out";
  bool model2_constant_without_dimension = false;
  /// Distances are taken over this window [days] if set, else the horizon.
  std::optional<std::pair<double, double>> compare_window_days;

  std::vector<double> time_grid() const;  ///< [s]
  /// Block problem for one delta.
  BlockProblem problem(double delta) const;
  void validate() const;
};

struct EffectiveScenario {
  std::string id = "custom";
  ConstitutiveSet constitutive;
  int dimension = 2;
  std::size_t nx = 32;
  std::size_t ny = 32;
  double lx = 10.0;  ///< [m]
  double ly = 10.0;  ///< [m]
  SourceModel source = SourceModel::I;
  bool model2_constant_without_dimension = false;
  std::array<BoundaryCondition, 4> boundary{};
  double initial_saturation = 0.2;
  double initial_nonwetting_pressure = 1.0e5;  ///< [Pa]
  double horizon_days = 10.0;
  double dt_days = 0.05;
  std::size_t snapshot_every = 0;
  NewtonControls newton;
  std::string output_dir = "out";

  EffectiveRunConfig run_config() const;
  void validate() const;
};

ScenarioConfig parse_scenario(const std::string& yaml_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
EffectiveScenario parse_effective_scenario(const std::string& yaml_text);
EffectiveScenario load_effective_scenario(const std::filesystem::path& path);

/// Run manifest: the full configuration in the input format, with
/// numbers in shortest round-trip form.
void write_manifest(std::ostream& os, const ScenarioConfig& config);
void write_manifest(std::ostream& os, const EffectiveScenario& config);

}  // namespace dualpor
