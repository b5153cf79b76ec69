#include "dualpor/presets.hpp"

#include "dualpor/errors.hpp"
#include "dualpor/units.hpp"

namespace dualpor {

namespace {

using units::bar;

ConstitutiveSet shared_media(double matrix_pr_bar, double fracture_pr_bar) {
  ConstitutiveSet set;
  set.matrix = {0.35, 1.0e-13, {bar(matrix_pr_bar), 2.0}};
  set.fracture = {0.01, 1.0e-13, {bar(fracture_pr_bar), 2.0}};
  set.fluids = {1.0e-3, 2.0e-3};
  return set;
}

ScenarioConfig base(const std::string& id, double matrix_pr_bar, double fracture_pr_bar) {
  ScenarioConfig c;
  c.id = id;
  c.constitutive = shared_media(matrix_pr_bar, fracture_pr_bar);
  c.deltas = preset_deltas();
  c.dimension = 2;
  c.trajectory = BoundaryTrajectory::ramp(0.05, 0.1, 0.9);
  c.horizon_days = 10.0;
  c.steps = 1000;
  c.output_dir = "out/" + id;
  return c;
}

std::string joined(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"sim1", "strong-contrast", "equal-Pc", "nonmonotone"};
}

std::vector<std::string> effective_preset_names() { return {"waterflood"}; }

std::vector<double> preset_deltas() { return {0.3, 0.2, 0.1, 5.0e-2, 1.0e-2, 1.0e-3}; }

ScenarioConfig preset(const std::string& name) {
  if (name == "sim1") return base(name, 1.0, 0.1);
  if (name == "strong-contrast") return base(name, 10.0, 0.1);
  if (name == "equal-Pc") return base(name, 1.0, 1.0);
  if (name == "nonmonotone") {
    auto c = base(name, 1.0, 0.1);
    c.trajectory = BoundaryTrajectory::sine(0.5, 0.5, 10.0);
    return c;
  }
  throw ParameterError("unknown preset '" + name + "'; known presets: " + joined(preset_names()));
}

EffectiveScenario effective_preset(const std::string& name) {
  if (name != "waterflood") {
    throw ParameterError("unknown effective preset '" + name +
                         "'; known presets: " + joined(effective_preset_names()));
  }
  EffectiveScenario c;
  c.id = name;
  c.constitutive = shared_media(1.0, 0.1);
  c.constitutive.fracture.permeability = 1.0e-11;
  c.dimension = 2;
  c.nx = 32;
  c.ny = 32;
  c.lx = 10.0;
  c.ly = 10.0;
  c.source = SourceModel::I;
  c.boundary[XMinus] = BoundaryCondition::injection(5.0e-7);
  c.boundary[XPlus] = BoundaryCondition::dirichlet(0.2, bar(1.0));
  c.initial_saturation = 0.2;
  c.initial_nonwetting_pressure = bar(1.0);
  c.horizon_days = 10.0;
  c.dt_days = 0.05;
  c.snapshot_every = 50;
  c.output_dir = "out/" + name;
  return c;
}

}  // namespace dualpor
