#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dualpor/comparison.hpp"
#include "dualpor/config.hpp"
#include "dualpor/csv.hpp"
#include "dualpor/fvsolver.hpp"
#include "dualpor/presets.hpp"
#include "dualpor/units.hpp"

namespace fs = std::filesystem;
using namespace dualpor;

namespace {

bool is_preset(const std::string& name, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (n == name) return true;
  }
  return false;
}

int list_presets() {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    std::cout << fmt::format("{:<16} block     d={} boundary: {}\n", name, c.dimension,
                             c.trajectory.describe());
  }
  for (const auto& name : effective_preset_names()) {
    const auto c = effective_preset(name);
    std::cout << fmt::format("{:<16} effective {}x{} cells, {} days\n", name, c.nx, c.ny,
                             format_number(c.horizon_days));
  }
  return 0;
}

struct RunArgs {
  std::string scenario;
  std::string out;
  std::size_t cells = 0;
  std::vector<double> deltas;
  std::vector<std::string> methods;
  std::size_t steps = 0;
};

int run(const RunArgs& args) {
  auto config = is_preset(args.scenario, preset_names()) ? preset(args.scenario)
                                                         : load_scenario(args.scenario);
  if (args.cells) config.mesh.cells_per_axis = args.cells;
  if (!args.deltas.empty()) config.deltas = args.deltas;
  if (args.steps) config.steps = args.steps;
  if (!args.methods.empty()) {
    config.methods.clear();
    for (const auto& m : args.methods) config.methods.push_back(parse_method(m));
  }
  if (!args.out.empty()) config.output_dir = args.out;
  const auto report = run_comparison(config, fs::path(config.output_dir));
  std::cout << fmt::format("{}: {} runs written to {}\n", report.scenario, report.runs.size(),
                           config.output_dir);
  for (const auto& p : report.pairs) {
    std::cout << fmt::format("  delta {:<8} {:>12} vs {:<12} rel-L2 {:.4e}  ref-L2 {:.4e}\n",
                             format_number(p.delta), method_tag(p.a), method_tag(p.b),
                             p.relative_l2, p.reference_l2);
  }
  for (const auto& r : report.sweep) {
    std::cout << fmt::format("  sweep {:<12} {:>8} -> {:<8} rel-L2 {:.4e}\n", method_tag(r.method),
                             format_number(r.delta_coarse), format_number(r.delta_fine),
                             r.relative_l2);
  }
  return 0;
}

int compare(const std::string& a, const std::string& b) {
  const auto sa = read_exchange_csv(fs::path(a));
  const auto sb = read_exchange_csv(fs::path(b));
  const auto d = compare_series(sa, sb);
  std::cout << fmt::format("relative_l2 {}\nsup {}\nrelative_sup {}\n", format_number(d.relative_l2),
                           format_number(d.sup), format_number(d.relative_sup));
  return 0;
}

int effective_run(const std::string& scenario, const std::string& out_override) {
  auto config = is_preset(scenario, effective_preset_names()) ? effective_preset(scenario)
                                                              : load_effective_scenario(scenario);
  if (!out_override.empty()) config.output_dir = out_override;
  const auto rc = config.run_config();
  const auto result = run_effective(rc);
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "mass_balance.csv", std::ios::binary);
    write_mass_balance_csv(os, result.balance);
  }
  for (const auto& snap : result.snapshots) {
    const auto name = fmt::format("snapshot_t{}.csv", format_number(units::to_days(snap.time)));
    std::ofstream os(dir / name, std::ios::binary);
    write_snapshot_csv(os, rc.grid, snap);
  }
  write_exchange_csv(dir / "cell0_source.csv", result.cell0_source);
  {
    std::ofstream os(dir / "manifest.yaml", std::ios::binary);
    write_manifest(os, config);
  }
  double worst = 0.0;
  int iterations = 0;
  for (const auto& b : result.balance) {
    worst = std::max({worst, b.wetting_imbalance, b.nonwetting_imbalance});
    iterations += b.newton_iterations;
  }
  std::cout << fmt::format("{}: {} steps, {} Newton iterations, worst relative imbalance {:.3e}\n",
                           config.id, result.balance.size(), iterations, worst);
  std::cout << fmt::format("output written to {}\n", config.output_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-fracture exchange in double porosity models"};
  app.require_subcommand(1);

  app.add_subcommand("list-presets", "List the named scenarios");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the block exchange comparison of a scenario");
  run_cmd->add_option("scenario", run_args.scenario, "Preset name or YAML config file")->required();
  run_cmd->add_option("--out", run_args.out, "Output directory");
  run_cmd->add_option("--cells", run_args.cells, "Block cells per axis");
  run_cmd->add_option("--delta", run_args.deltas, "Delta values (repeatable)");
  run_cmd->add_option("--methods", run_args.methods, "nlin, clin, vlin, effective-I, effective-II")
      ->delimiter(',');
  run_cmd->add_option("--steps", run_args.steps, "Time steps over the horizon");

  std::string csv_a, csv_b;
  auto* cmp_cmd = app.add_subcommand("compare", "Distance of the first exchange CSV from the second");
  cmp_cmd->add_option("a", csv_a, "Exchange CSV")->required();
  cmp_cmd->add_option("b", csv_b, "Reference exchange CSV")->required();

  std::string eff_scenario, eff_out;
  auto* eff_cmd = app.add_subcommand("effective-run", "Run the effective reservoir model");
  eff_cmd->add_option("config", eff_scenario, "Preset name or YAML config file")->required();
  eff_cmd->add_option("--out", eff_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-presets")) return list_presets();
    if (app.got_subcommand(run_cmd)) return run(run_args);
    if (app.got_subcommand(cmp_cmd)) return compare(csv_a, csv_b);
    if (app.got_subcommand(eff_cmd)) return effective_run(eff_scenario, eff_out);
  } catch (const std::exception& e) {
    std::cerr << "dualpor: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
