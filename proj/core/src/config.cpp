#include "dualpor/config.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dualpor/csv.hpp"
#include "dualpor/errors.hpp"
#include "dualpor/units.hpp"

namespace dualpor {

std::vector<double> ScenarioConfig::time_grid() const {
  return uniform_time_grid(units::days(horizon_days), steps);
}

BlockProblem ScenarioConfig::problem(double delta) const {
  BlockProblem p;
  p.model = std::make_shared<const ConstitutiveModel>(constitutive);
  p.delta = delta;
  p.dimension = dimension;
  p.trajectory = trajectory;
  p.time_grid = time_grid();
  p.mesh = mesh;
  return p;
}

void ScenarioConfig::validate() const {
  constitutive.validate();
  if (deltas.empty()) throw ParameterError(id + ": delta list is empty");
  for (double d : deltas) {
    if (!(d > 0.0 && d < 0.5)) throw ParameterError(id + ": delta values must lie in (0, 0.5)");
  }
  if (dimension < 1 || dimension > 3) throw ParameterError(id + ": dimension must be 1..3");
  if (!(horizon_days > 0.0)) throw ParameterError(id + ": horizon must be positive");
  if (steps == 0) throw ParameterError(id + ": steps must be positive");
  if (methods.empty()) throw ParameterError(id + ": no methods selected");
  if (mesh.cells_per_axis < 8 || mesh.cells_per_axis % 2 != 0) {
    throw ParameterError(id + ": cells_per_axis must be even and at least 8");
  }
  if (compare_window_days &&
      !(compare_window_days->first < compare_window_days->second &&
        compare_window_days->first >= 0.0)) {
    throw ParameterError(id + ": compare window must satisfy 0 <= lo < hi");
  }
}

EffectiveRunConfig EffectiveScenario::run_config() const {
  validate();
  EffectiveRunConfig rc;
  rc.grid = StructuredGrid::rectangle(nx, ny, lx, ly);
  auto model = std::make_shared<const ConstitutiveModel>(constitutive);
  rc.params.model = model;
  rc.params.fracture_porosity = constitutive.fracture.porosity;
  rc.params.k_star = EffectiveParams::k_star_from(constitutive.fracture.permeability, dimension);
  rc.params.source =
      source == SourceModel::I
          ? EffectiveSourceParams::model1(dimension, constitutive.matrix, model->alpha_bar())
          : EffectiveSourceParams::model2(dimension, constitutive.matrix,
                                          model2_constant_without_dimension);
  rc.boundary = boundary;
  rc.initial_saturation = initial_saturation;
  rc.initial_nonwetting_pressure = initial_nonwetting_pressure;
  rc.horizon = units::days(horizon_days);
  rc.dt = units::days(dt_days);
  rc.newton = newton;
  rc.snapshot_every = snapshot_every;
  return rc;
}

void EffectiveScenario::validate() const {
  constitutive.validate();
  if (dimension != 2) throw ParameterError(id + ": effective runs need d = 2 (k* vanishes for d = 1)");
  if (nx == 0 || ny == 0) throw ParameterError(id + ": empty grid");
  if (!(lx > 0.0 && ly > 0.0)) throw ParameterError(id + ": domain lengths must be positive");
  if (!(initial_saturation > 0.0 && initial_saturation < 1.0)) {
    throw ParameterError(id + ": initial saturation must lie in (0, 1)");
  }
  if (!(horizon_days > 0.0 && dt_days > 0.0)) {
    throw ParameterError(id + ": horizon and dt must be positive");
  }
}

namespace {

using units::bar;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParameterError("config " + where + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, const T& fallback, const std::string& where) {
  const auto v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    fail(where, "bad value for '" + key + "'");
  }
}

MediumProps read_medium(const YAML::Node& node, MediumProps m, const std::string& where) {
  if (!node) return m;
  check_keys(node, where, {"porosity", "permeability", "p_r_bar", "n"});
  m.porosity = get(node, "porosity", m.porosity, where);
  m.permeability = get(node, "permeability", m.permeability, where);
  m.vg.p_r = bar(get(node, "p_r_bar", m.vg.p_r / units::kPascalPerBar, where));
  m.vg.n = get(node, "n", m.vg.n, where);
  return m;
}

ConstitutiveSet read_media(const YAML::Node& root, ConstitutiveSet set) {
  set.matrix = read_medium(root["matrix"], set.matrix, "matrix");
  set.fracture = read_medium(root["fracture"], set.fracture, "fracture");
  if (const auto f = root["fluids"]) {
    check_keys(f, "fluids", {"mu_w", "mu_n"});
    set.fluids.mu_w = get(f, "mu_w", set.fluids.mu_w, "fluids");
    set.fluids.mu_n = get(f, "mu_n", set.fluids.mu_n, "fluids");
  }
  return set;
}

ConstitutiveSet default_media() {
  ConstitutiveSet set;
  set.matrix = {0.35, 1.0e-13, {bar(1.0), 2.0}};
  set.fracture = {0.01, 1.0e-13, {bar(0.1), 2.0}};
  set.fluids = {1.0e-3, 2.0e-3};
  return set;
}

BoundaryTrajectory read_trajectory(const YAML::Node& node) {
  const std::string where = "boundary";
  if (!node.IsMap()) fail(where, "expected a mapping");
  const auto kind = get<std::string>(node, "kind", "", where);
  if (kind == "constant") {
    check_keys(node, where, {"kind", "value"});
    return BoundaryTrajectory::constant(get(node, "value", 0.5, where));
  }
  if (kind == "ramp") {
    check_keys(node, where, {"kind", "start", "rate_per_day", "rise"});
    return BoundaryTrajectory::ramp(get(node, "start", 0.05, where),
                                    get(node, "rate_per_day", 0.1, where),
                                    get(node, "rise", 0.9, where));
  }
  if (kind == "sine") {
    check_keys(node, where, {"kind", "mean", "amplitude", "period_days"});
    return BoundaryTrajectory::sine(get(node, "mean", 0.5, where), get(node, "amplitude", 0.5, where),
                                    get(node, "period_days", 10.0, where));
  }
  if (kind == "step") {
    check_keys(node, where, {"kind", "before", "after"});
    return BoundaryTrajectory::step(get(node, "before", 0.05, where),
                                    get(node, "after", 0.95, where));
  }
  fail(where, "kind must be constant, ramp, sine or step");
}

MeshSymmetry parse_symmetry(const std::string& s) {
  if (s == "full") return MeshSymmetry::Full;
  if (s == "octant") return MeshSymmetry::Octant;
  fail("mesh", "symmetry must be full or octant");
}

const char* symmetry_tag(MeshSymmetry s) { return s == MeshSymmetry::Full ? "full" : "octant"; }

YAML::Node parse_root(const std::string& text) {
  try {
    auto root = YAML::Load(text);
    if (!root.IsMap()) fail("file", "top level must be a mapping");
    return root;
  } catch (const YAML::Exception& e) {
    fail("file", e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BoundaryCondition read_boundary_condition(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  const auto kind = get<std::string>(node, "kind", "no-flow", where);
  if (kind == "no-flow") {
    check_keys(node, where, {"kind"});
    return BoundaryCondition::no_flow();
  }
  if (kind == "dirichlet") {
    check_keys(node, where, {"kind", "saturation", "p_n_bar"});
    return BoundaryCondition::dirichlet(get(node, "saturation", 0.2, where),
                                        bar(get(node, "p_n_bar", 1.0, where)));
  }
  if (kind == "injection") {
    check_keys(node, where, {"kind", "wetting_flux"});
    return BoundaryCondition::injection(get(node, "wetting_flux", 0.0, where));
  }
  fail(where, "kind must be no-flow, dirichlet or injection");
}

const char* kSideNames[4] = {"x_minus", "x_plus", "y_minus", "y_plus"};

std::string num(double v) { return format_number(v); }

void write_media(std::ostream& os, const ConstitutiveSet& set) {
  auto medium = [&](const char* name, const MediumProps& m) {
    os << fmt::format("{}:\n  porosity: {}\n  permeability: {}\n  p_r_bar: {}\n  n: {}\n", name,
                      num(m.porosity), num(m.permeability),
                      num(m.vg.p_r / units::kPascalPerBar), num(m.vg.n));
  };
  medium("matrix", set.matrix);
  medium("fracture", set.fracture);
  os << fmt::format("fluids:\n  mu_w: {}\n  mu_n: {}\n", num(set.fluids.mu_w), num(set.fluids.mu_n));
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& yaml_text) {
  const auto root = parse_root(yaml_text);
  check_keys(root, "file",
             {"scenario", "dimension", "deltas", "horizon_days", "steps", "methods", "output_dir",
              "matrix", "fracture", "fluids", "boundary", "mesh",
              "model2_constant_without_dimension", "compare_window_days"});
  ScenarioConfig c;
  c.constitutive = read_media(root, default_media());
  c.id = get<std::string>(root, "scenario", c.id, "file");
  c.dimension = get(root, "dimension", c.dimension, "file");
  c.deltas = get(root, "deltas", c.deltas, "file");
  c.horizon_days = get(root, "horizon_days", c.horizon_days, "file");
  c.steps = get(root, "steps", c.steps, "file");
  c.output_dir = get<std::string>(root, "output_dir", c.output_dir, "file");
  c.model2_constant_without_dimension =
      get(root, "model2_constant_without_dimension", false, "file");
  if (const auto m = root["methods"]) {
    c.methods.clear();
    for (const auto& tag : m.as<std::vector<std::string>>()) {
      try {
        c.methods.push_back(parse_method(tag));
      } catch (const ParameterError& e) {
        fail("methods", e.what());
      }
    }
  }
  if (const auto b = root["boundary"]) c.trajectory = read_trajectory(b);
  if (const auto m = root["mesh"]) {
    check_keys(m, "mesh", {"cells_per_axis", "kappa", "q", "symmetry"});
    c.mesh.cells_per_axis = get(m, "cells_per_axis", c.mesh.cells_per_axis, "mesh");
    c.mesh.grading.kappa = get(m, "kappa", c.mesh.grading.kappa, "mesh");
    c.mesh.grading.q = get(m, "q", c.mesh.grading.q, "mesh");
    c.mesh.symmetry = parse_symmetry(get<std::string>(m, "symmetry", "full", "mesh"));
  }
  if (const auto w = root["compare_window_days"]) {
    const auto v = w.as<std::vector<double>>();
    if (v.size() != 2) fail("compare_window_days", "expected [lo, hi]");
    c.compare_window_days = std::make_pair(v[0], v[1]);
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

EffectiveScenario parse_effective_scenario(const std::string& yaml_text) {
  const auto root = parse_root(yaml_text);
  check_keys(root, "file",
             {"scenario", "output_dir", "matrix", "fracture", "fluids", "effective"});
  EffectiveScenario c;
  c.constitutive = read_media(root, default_media());
  c.id = get<std::string>(root, "scenario", c.id, "file");
  c.output_dir = get<std::string>(root, "output_dir", c.output_dir, "file");
  const auto e = root["effective"];
  if (!e) fail("file", "missing 'effective' section");
  check_keys(e, "effective",
             {"dimension", "nx", "ny", "lx", "ly", "source", "model2_constant_without_dimension",
              "initial_saturation", "initial_p_n_bar", "horizon_days", "dt_days",
              "snapshot_every", "newton_tolerance", "boundary"});
  c.dimension = get(e, "dimension", c.dimension, "effective");
  c.nx = get(e, "nx", c.nx, "effective");
  c.ny = get(e, "ny", c.ny, "effective");
  c.lx = get(e, "lx", c.lx, "effective");
  c.ly = get(e, "ly", c.ly, "effective");
  const auto src = get<std::string>(e, "source", "I", "effective");
  if (src == "I") {
    c.source = SourceModel::I;
  } else if (src == "II") {
    c.source = SourceModel::II;
  } else {
    fail("effective", "source must be I or II");
  }
  c.model2_constant_without_dimension =
      get(e, "model2_constant_without_dimension", false, "effective");
  c.initial_saturation = get(e, "initial_saturation", c.initial_saturation, "effective");
  c.initial_nonwetting_pressure =
      bar(get(e, "initial_p_n_bar", c.initial_nonwetting_pressure / units::kPascalPerBar,
              "effective"));
  c.horizon_days = get(e, "horizon_days", c.horizon_days, "effective");
  c.dt_days = get(e, "dt_days", c.dt_days, "effective");
  c.snapshot_every = get(e, "snapshot_every", c.snapshot_every, "effective");
  c.newton.tolerance = get(e, "newton_tolerance", c.newton.tolerance, "effective");
  if (const auto b = e["boundary"]) {
    check_keys(b, "effective.boundary", {"x_minus", "x_plus", "y_minus", "y_plus"});
    for (int s = 0; s < 4; ++s) {
      if (const auto side = b[kSideNames[s]]) {
        c.boundary[static_cast<std::size_t>(s)] =
            read_boundary_condition(side, std::string("effective.boundary.") + kSideNames[s]);
      }
    }
  }
  c.validate();
  return c;
}

EffectiveScenario load_effective_scenario(const std::filesystem::path& path) {
  return parse_effective_scenario(read_file(path));
}

void write_manifest(std::ostream& os, const ScenarioConfig& c) {
  os << "scenario: " << c.id << "\n";
  os << "dimension: " << c.dimension << "\n";
  os << "deltas: [";
  for (std::size_t i = 0; i < c.deltas.size(); ++i) os << (i ? ", " : "") << num(c.deltas[i]);
  os << "]\n";
  os << "horizon_days: " << num(c.horizon_days) << "\n";
  os << "steps: " << c.steps << "\n";
  os << "methods: [";
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    os << (i ? ", " : "") << method_tag(c.methods[i]);
  }
  os << "]\n";
  os << "output_dir: " << c.output_dir << "\n";
  write_media(os, c.constitutive);
  const auto& p = c.trajectory.params();
  switch (c.trajectory.kind()) {
    case BoundaryTrajectory::Kind::Constant:
      os << fmt::format("boundary:\n  kind: constant\n  value: {}\n", num(p[0]));
      break;
    case BoundaryTrajectory::Kind::Ramp:
      os << fmt::format("boundary:\n  kind: ramp\n  start: {}\n  rate_per_day: {}\n  rise: {}\n",
                        num(p[0]), num(p[1]), num(p[2]));
      break;
    case BoundaryTrajectory::Kind::Sine:
      os << fmt::format("boundary:\n  kind: sine\n  mean: {}\n  amplitude: {}\n  period_days: {}\n",
                        num(p[0]), num(p[1]), num(p[2]));
      break;
    case BoundaryTrajectory::Kind::Step:
      os << fmt::format("boundary:\n  kind: step\n  before: {}\n  after: {}\n", num(p[0]), num(p[1]));
      break;
  }
  os << fmt::format("mesh:\n  cells_per_axis: {}\n  kappa: {}\n  q: {}\n  symmetry: {}\n",
                    c.mesh.cells_per_axis, num(c.mesh.grading.kappa), num(c.mesh.grading.q),
                    symmetry_tag(c.mesh.symmetry));
  os << "model2_constant_without_dimension: "
     << (c.model2_constant_without_dimension ? "true" : "false") << "\n";
  if (c.compare_window_days) {
    os << "compare_window_days: [" << num(c.compare_window_days->first) << ", "
       << num(c.compare_window_days->second) << "]\n";
  }
}

void write_manifest(std::ostream& os, const EffectiveScenario& c) {
  os << "scenario: " << c.id << "\n";
  os << "output_dir: " << c.output_dir << "\n";
  write_media(os, c.constitutive);
  os << "effective:\n";
  os << "  dimension: " << c.dimension << "\n";
  os << "  nx: " << c.nx << "\n  ny: " << c.ny << "\n";
  os << "  lx: " << num(c.lx) << "\n  ly: " << num(c.ly) << "\n";
  os << "  source: " << (c.source == SourceModel::I ? "I" : "II") << "\n";
  os << "  model2_constant_without_dimension: "
     << (c.model2_constant_without_dimension ? "true" : "false") << "\n";
  os << "  initial_saturation: " << num(c.initial_saturation) << "\n";
  os << "  initial_p_n_bar: " << num(c.initial_nonwetting_pressure / units::kPascalPerBar) << "\n";
  os << "  horizon_days: " << num(c.horizon_days) << "\n";
  os << "  dt_days: " << num(c.dt_days) << "\n";
  os << "  snapshot_every: " << c.snapshot_every << "\n";
  os << "  newton_tolerance: " << num(c.newton.tolerance) << "\n";
  os << "  boundary:\n";
  for (int s = 0; s < 4; ++s) {
    const auto& b = c.boundary[static_cast<std::size_t>(s)];
    os << "    " << kSideNames[s] << ": ";
    switch (b.kind) {
      case BoundaryKind::NoFlow:
        os << "{kind: no-flow}\n";
        break;
      case BoundaryKind::Dirichlet:
        os << "{kind: dirichlet, saturation: " << num(b.saturation)
           << ", p_n_bar: " << num(b.nonwetting_pressure / units::kPascalPerBar) << "}\n";
        break;
      case BoundaryKind::Injection:
        os << "{kind: injection, wetting_flux: " << num(b.wetting_flux) << "}\n";
        break;
    }
  }
}

}  // namespace dualpor
