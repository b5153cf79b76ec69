#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "dualpor/config.hpp"
#include "dualpor/constitutive.hpp"
#include "dualpor/effective.hpp"
#include "dualpor/fvsolver.hpp"
#include "dualpor/imbibition.hpp"
#include "dualpor/presets.hpp"
#include "dualpor/units.hpp"

using namespace dualpor;

namespace {

const ConstitutiveSet& sim1_media() {
  static const ConstitutiveSet set = preset("sim1").constitutive;
  return set;
}

void BM_BetaTable(benchmark::State& state) {
  for (auto _ : state) {
    ConstitutiveModel model(sim1_media());
    benchmark::DoNotOptimize(model.beta(0.5));
  }
}
BENCHMARK(BM_BetaTable)->Unit(benchmark::kMillisecond);

void BM_BlockStep(benchmark::State& state) {
  auto config = preset("sim1");
  config.dimension = 2;
  config.mesh.cells_per_axis = static_cast<std::size_t>(state.range(0));
  const auto problem = config.problem(1.0e-2);
  const auto mesh = make_block_mesh(problem);
  const std::vector<double> s(mesh.cell_count(), problem.initial_value());
  const double boundary = problem.boundary_value(units::days(0.01));
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_nonlinear(s, units::days(0.01), boundary, problem, mesh));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(mesh.cell_count()));
}
BENCHMARK(BM_BlockStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ModelOneHistory(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto grid = uniform_time_grid(units::days(10.0), steps);
  const QuadratureTable table(grid, 1.0e-4);
  std::vector<double> p(grid.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.5 + 0.4 * static_cast<double>(k) / steps;
  for (auto _ : state) benchmark::DoNotOptimize(q_model1(p, table, steps - 1));
}
BENCHMARK(BM_ModelOneHistory)->Arg(200)->Arg(1000)->Arg(5000);

void BM_FvAssembly(benchmark::State& state) {
  auto scenario = effective_preset("waterflood");
  scenario.nx = scenario.ny = static_cast<std::size_t>(state.range(0));
  const auto config = scenario.run_config();
  const auto initial = initial_state(config.grid, config.params, config.initial_saturation,
                                     config.initial_nonwetting_pressure);
  const EffectiveStepSystem system(config.grid, config.params, config.boundary, initial, config.dt);
  std::vector<double> x(system.unknowns());
  for (std::size_t i = 0; i < config.grid.cell_count(); ++i) {
    x[2 * i] = initial.saturation[i];
    x[2 * i + 1] = initial.nonwetting_pressure[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(system.assemble(x));
}
BENCHMARK(BM_FvAssembly)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
