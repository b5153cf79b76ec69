#include "dualpor/linearized.hpp"

#include <algorithm>
#include <cmath>

#include "dualpor/errors.hpp"

namespace dualpor {

BlockRun clin_run(const BlockProblem& problem) {
  problem.validate();
  const BlockMesh mesh = make_block_mesh(problem);
  LinearDiffusivity f(problem.model->alpha_bar());
  BlockRun run;
  run.solution = solve_block(problem, mesh, f);
  run.volume = exchange_from_volume(run.solution, ExchangeMethod::ConstantLinear);
  run.flux = exchange_from_flux(run.solution, ExchangeMethod::ConstantLinear);
  return run;
}

namespace {

bool is_equidistant(const std::vector<double>& grid) {
  if (grid.size() < 3) return true;
  const double h = grid[1] - grid[0];
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    if (std::abs((grid[k + 1] - grid[k]) - h) > 1e-9 * h) return false;
  }
  return true;
}

}  // namespace

ExchangeSeries clin_exchange_convolution(const BlockProblem& problem, const KernelSeries& kernel) {
  problem.validate();
  const auto& grid = problem.time_grid;
  const std::size_t n_nodes = grid.size();
  ExchangeSeries q;
  q.method = ExchangeMethod::ConstantLinear;
  q.delta = problem.delta;
  if (n_nodes < 2) return q;

  const double s0 = problem.initial_value();
  // increments of the right-endpoint boundary data, applied at t_{j-1}
  std::vector<double> jump(n_nodes, 0.0);
  double prev = 0.0;
  for (std::size_t j = 1; j < n_nodes; ++j) {
    const double g = problem.boundary_value(grid[j]) - s0;
    jump[j] = g - prev;
    prev = g;
  }

  const bool uniform = is_equidistant(grid);
  std::vector<double> lag_mean;
  if (uniform) {
    const double h = grid[1] - grid[0];
    lag_mean.resize(n_nodes);
    for (std::size_t l = 0; l < n_nodes; ++l) lag_mean[l] = kernel.mean(static_cast<double>(l) * h);
  }

  std::vector<double> absorbed(n_nodes, 0.0);
  for (std::size_t n = 1; n < n_nodes; ++n) {
    double f = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      if (jump[j] == 0.0) continue;
      const double m = uniform ? lag_mean[n - j + 1] : kernel.mean(grid[n] - grid[j - 1]);
      f += jump[j] * m;
    }
    absorbed[n] = f;
  }

  for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
    const double dt = grid[k + 1] - grid[k];
    q.times.push_back(0.5 * (grid[k] + grid[k + 1]));
    q.values.push_back(-kernel.porosity() * (absorbed[k + 1] - absorbed[k]) / dt);
  }
  return q;
}

TimeChange build_time_change(const BoundaryTrajectory& trajectory, const std::vector<double>& grid,
                             const ConstitutiveModel& model, AlphaHatPolicy policy) {
  validate_time_grid(grid);
  TimeChange tc;
  tc.times = grid;
  tc.tau.assign(grid.size(), 0.0);
  double s_min = trajectory(grid.front());
  double s_max = s_min;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (policy == AlphaHatPolicy::EndOfStep || k > 0) {
      const double s = trajectory(grid[policy == AlphaHatPolicy::EndOfStep ? k + 1 : k]);
      s_min = std::min(s_min, s);
      s_max = std::max(s_max, s);
    }
    const double a = model.alpha_hat(s_min, s_max);
    tc.alpha_hat.push_back(a);
    tc.tau[k + 1] = tc.tau[k] + a * (grid[k + 1] - grid[k]);
  }
  return tc;
}

namespace {

BlockRun vlin_direct(const BlockProblem& problem, const BlockMesh& mesh,
                     const std::vector<double>& alpha_hat) {
  std::vector<LinearDiffusivity> storage;
  storage.reserve(alpha_hat.size());
  for (double a : alpha_hat) storage.emplace_back(a);
  std::vector<const Diffusivity*> per_interval;
  per_interval.reserve(storage.size());
  for (const auto& f : storage) per_interval.push_back(&f);
  BlockRun run;
  run.solution = solve_block(problem, mesh, per_interval);
  run.volume = exchange_from_volume(run.solution, ExchangeMethod::VariableLinear);
  run.flux = exchange_from_flux(run.solution, ExchangeMethod::VariableLinear);
  return run;
}

BlockRun vlin_time_change(const BlockProblem& problem, const BlockMesh& mesh,
                          const std::vector<double>& alpha_hat) {
  const auto& grid = problem.time_grid;
  BlockSolver solver(mesh, problem.matrix().porosity, problem.diffusion_coefficient(),
                     problem.newton);
  const LinearDiffusivity unit(1.0);
  BlockRun run;
  auto& sol = run.solution;
  sol.porosity = problem.matrix().porosity;
  sol.mesh_volume = mesh.mesh_volume();
  sol.delta = problem.delta;
  sol.times = grid;
  std::vector<double> s(mesh.cell_count(), problem.initial_value());
  sol.boundary_values.push_back(problem.boundary_value(grid.front()));
  sol.means.push_back(solver.mean(s));
  if (problem.mesh.store_fields) sol.fields.push_back(s);

  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double dtau = alpha_hat[k] * (grid[k + 1] - grid[k]);
    const double bc = problem.boundary_value(grid[k + 1]);
    // on a flat stretch of tau the field does not move
    if (dtau > 0.0) {
      const auto rep = solver.step(s, dtau, bc, unit);
      sol.diagnostics.newton_iterations += rep.iterations;
      sol.diagnostics.substeps += 1;
      sol.diagnostics.max_residual = std::max(sol.diagnostics.max_residual, rep.residual);
    }
    sol.boundary_values.push_back(bc);
    sol.means.push_back(solver.mean(s));
    sol.tpfa_inflow.push_back(alpha_hat[k] * solver.tpfa_inflow(s, bc, unit));
    sol.gradient_inflow.push_back(alpha_hat[k] * solver.gradient_inflow(s, bc, unit));
    if (problem.mesh.store_fields) sol.fields.push_back(s);
  }
  run.volume = exchange_from_volume(sol, ExchangeMethod::VariableLinear);
  run.flux = exchange_from_flux(sol, ExchangeMethod::VariableLinear);
  return run;
}

}  // namespace

BlockRun vlin_run(const BlockProblem& problem, const VlinOptions& options) {
  problem.validate();
  const BlockMesh mesh = make_block_mesh(problem);
  std::vector<double> alpha_hat;
  if (options.forced_alpha) {
    if (!(*options.forced_alpha > 0.0)) throw ParameterError("forced alpha must be positive");
    alpha_hat.assign(problem.time_grid.size() - 1, *options.forced_alpha);
  } else {
    alpha_hat = build_time_change(problem.trajectory, problem.time_grid, *problem.model,
                                  options.policy)
                    .alpha_hat;
  }
  return options.path == VlinPath::Direct ? vlin_direct(problem, mesh, alpha_hat)
                                          : vlin_time_change(problem, mesh, alpha_hat);
}

}  // namespace dualpor
