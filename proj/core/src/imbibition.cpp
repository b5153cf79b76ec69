#include "dualpor/imbibition.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "dualpor/comparison.hpp"
#include "dualpor/errors.hpp"

namespace dualpor {

std::string method_tag(ExchangeMethod method) {
  switch (method) {
    case ExchangeMethod::Nonlinear:
      return "nlin";
    case ExchangeMethod::ConstantLinear:
      return "clin";
    case ExchangeMethod::VariableLinear:
      return "vlin";
    case ExchangeMethod::EffectiveI:
      return "effective-I";
    case ExchangeMethod::EffectiveII:
      return "effective-II";
  }
  return "unknown";
}

ExchangeMethod parse_method(const std::string& tag) {
  for (auto m : {ExchangeMethod::Nonlinear, ExchangeMethod::ConstantLinear,
                 ExchangeMethod::VariableLinear, ExchangeMethod::EffectiveI,
                 ExchangeMethod::EffectiveII}) {
    if (method_tag(m) == tag) return m;
  }
  throw ParameterError("unknown method '" + tag +
                       "' (expected nlin, clin, vlin, effective-I or effective-II)");
}

ExchangeSeries ExchangeSeries::per_delta() const {
  ExchangeSeries out = *this;
  if (divided_by_delta) return out;
  if (!(delta > 0.0)) throw ParameterError("exchange series has no delta to divide by");
  for (double& v : out.values) v /= delta;
  out.divided_by_delta = true;
  return out;
}

double BlockProblem::diffusion_coefficient() const {
  return delta * delta * matrix().permeability;
}

double BlockProblem::linear_diffusivity() const {
  return diffusion_coefficient() * model->alpha_bar() / matrix().porosity;
}

double BlockProblem::initial_value() const {
  return initial_saturation ? *initial_saturation : model->transfer(trajectory.initial());
}

double BlockProblem::boundary_value(double t) const { return model->transfer(trajectory(t)); }

void BlockProblem::validate() const {
  if (!model) throw ParameterError("block problem has no constitutive model");
  if (!(delta > 0.0 && delta < 0.5)) throw ParameterError("delta must lie in (0, 0.5)");
  if (dimension < 1 || dimension > 3) throw ParameterError("block dimension must be 1..3");
  const double s0 = initial_value();
  if (!(s0 > 0.0 && s0 < 1.0)) throw ParameterError("initial block saturation must lie in (0, 1)");
  validate_time_grid(time_grid);
}

BlockMesh make_block_mesh(const BlockProblem& problem) {
  const double horizon = problem.time_grid.empty() ? 0.0 : problem.time_grid.back();
  const auto axis = bakhvalov_grid(problem.mesh.cells_per_axis, problem.delta,
                                   problem.linear_diffusivity() * horizon, problem.mesh.grading);
  return BlockMesh::cube(axis, problem.dimension, problem.mesh.symmetry);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

}  // namespace

struct BlockSolver::Impl {
  std::size_t n = 0;
  double porosity = 0.0;
  double coef = 0.0;
  NewtonSettings settings;
  Vec pore_volume;       // Phi * V
  Vec boundary_weight;   // sum of boundary half-transmissibilities per cell
  SpMat laplacian;       // TPFA operator including boundary diagonal
  Eigen::SimplicialLDLT<SpMat> newton_solver;
  bool pattern_ready = false;
  Eigen::SimplicialLDLT<SpMat> linear_solver;
  double linear_dt = -1.0;
  double linear_c = -1.0;

  Vec apply_laplacian(const Vec& x) const { return laplacian * x; }

  // residual scaled by dt / (Phi V), in saturation units
  Vec residual(const Vec& s, const Vec& s_old, double dt, double boundary,
               const Diffusivity& f) const {
    Vec b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) b[static_cast<Eigen::Index>(i)] = f.beta(s[static_cast<Eigen::Index>(i)]);
    const double beta_b = f.beta(boundary);
    Vec flux = coef * (laplacian * b - boundary_weight * beta_b);
    Vec r = (s - s_old) + dt * flux.cwiseQuotient(pore_volume);
    return r;
  }
};

BlockSolver::BlockSolver(const BlockMesh& mesh, double porosity, double coefficient,
                         NewtonSettings settings)
    : mesh_(&mesh), impl_(std::make_unique<Impl>()) {
  if (!(porosity > 0.0 && porosity < 1.0)) throw ParameterError("porosity must lie in (0, 1)");
  if (!(coefficient > 0.0)) throw ParameterError("diffusion coefficient must be positive");
  auto& im = *impl_;
  im.n = mesh.cell_count();
  im.porosity = porosity;
  im.coef = coefficient;
  im.settings = settings;
  const auto n = static_cast<Eigen::Index>(im.n);
  im.pore_volume.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    im.pore_volume[i] = porosity * mesh.volumes()[static_cast<std::size_t>(i)];
  }
  im.boundary_weight = Vec::Zero(n);
  for (const auto& f : mesh.boundary_faces()) {
    im.boundary_weight[static_cast<Eigen::Index>(f.cell)] += f.area / f.distance;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * mesh.connections().size() + im.n);
  for (const auto& c : mesh.connections()) {
    const auto a = static_cast<int>(c.a);
    const auto b = static_cast<int>(c.b);
    trip.emplace_back(a, a, c.transmissibility);
    trip.emplace_back(b, b, c.transmissibility);
    trip.emplace_back(a, b, -c.transmissibility);
    trip.emplace_back(b, a, -c.transmissibility);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), im.boundary_weight[i]);
  }
  im.laplacian.resize(n, n);
  im.laplacian.setFromTriplets(trip.begin(), trip.end());
  im.laplacian.makeCompressed();
}

BlockSolver::~BlockSolver() = default;
BlockSolver::BlockSolver(BlockSolver&&) noexcept = default;
BlockSolver& BlockSolver::operator=(BlockSolver&&) noexcept = default;

StepReport BlockSolver::step(std::vector<double>& s, double dt, double boundary,
                             const Diffusivity& f) {
  auto& im = *impl_;
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (s.size() != im.n) throw ParameterError("state size does not match the mesh");
  const auto n = static_cast<Eigen::Index>(im.n);
  const Vec s_old = Eigen::Map<const Vec>(s.data(), n);
  StepReport report;

  if (f.is_linear()) {
    const double c = static_cast<const LinearDiffusivity&>(f).coefficient();
    // grid steps that differ by rounding reuse the factorization plus one refinement
    if (std::abs(dt - im.linear_dt) > 1e-6 * dt || c != im.linear_c) {
      SpMat m = (im.coef * c) * im.laplacian;
      for (Eigen::Index i = 0; i < n; ++i) m.coeffRef(i, i) += im.pore_volume[i] / dt;
      im.linear_solver.compute(m);
      if (im.linear_solver.info() != Eigen::Success) {
        throw StepError("block step: linear factorization failed", 0.0, 0);
      }
      im.linear_dt = dt;
      im.linear_c = c;
    }
    Vec rhs = im.pore_volume.cwiseProduct(s_old) / dt + (im.coef * c * boundary) * im.boundary_weight;
    Vec s_new = im.linear_solver.solve(rhs);
    if (dt != im.linear_dt) {
      const Vec defect = rhs - im.pore_volume.cwiseProduct(s_new) / dt -
                         (im.coef * c) * (im.laplacian * s_new);
      s_new += im.linear_solver.solve(defect);
    }
    report.iterations = 1;
    report.residual = im.residual(s_new, s_old, dt, boundary, f).lpNorm<Eigen::Infinity>();
    Eigen::Map<Vec>(s.data(), n) = s_new;
    return report;
  }

  Vec x = s_old;
  Vec alpha(n);
  for (int it = 0;; ++it) {
    const Vec r = im.residual(x, s_old, dt, boundary, f);
    const double res = r.lpNorm<Eigen::Infinity>();
    report.iterations = it;
    report.residual = res;
    if (!std::isfinite(res)) throw StepError("block step: non-finite residual", res, it);
    if (res <= im.settings.tolerance) break;
    if (it >= im.settings.max_iterations) {
      throw StepError("block step: Newton did not converge", res, it);
    }
    double alpha_max = f.alpha(boundary);
    for (Eigen::Index i = 0; i < n; ++i) {
      alpha[i] = f.alpha(x[i]);
      alpha_max = std::max(alpha_max, alpha[i]);
    }
    const double floor = 1.0e-14 * alpha_max;
    for (Eigen::Index i = 0; i < n; ++i) alpha[i] = std::max(alpha[i], floor);
    // J = diag(Phi V / dt) + coef A diag(alpha); with w = alpha * dS the
    // system becomes symmetric positive definite.
    SpMat m = im.coef * im.laplacian;
    for (Eigen::Index i = 0; i < n; ++i) m.coeffRef(i, i) += im.pore_volume[i] / (dt * alpha[i]);
    if (!im.pattern_ready) {
      im.newton_solver.analyzePattern(m);
      im.pattern_ready = true;
    }
    im.newton_solver.factorize(m);
    if (im.newton_solver.info() != Eigen::Success) {
      throw StepError("block step: factorization failed", res, it);
    }
    const Vec rhs = -r.cwiseProduct(im.pore_volume) / dt;
    const Vec w = im.newton_solver.solve(rhs);
    x += w.cwiseQuotient(alpha);
    x = x.cwiseMax(0.0).cwiseMin(1.0);
  }
  Eigen::Map<Vec>(s.data(), n) = x;
  return report;
}

double BlockSolver::tpfa_inflow(const std::vector<double>& s, double boundary,
                                const Diffusivity& f) const {
  const double beta_b = f.beta(boundary);
  double q = 0.0;
  for (const auto& face : mesh_->boundary_faces()) {
    q += face.area / face.distance * (beta_b - f.beta(s[face.cell]));
  }
  return impl_->coef * q;
}

double BlockSolver::gradient_inflow(const std::vector<double>& s, double boundary,
                                    const Diffusivity& f) const {
  const double beta_b = f.beta(boundary);
  double q = 0.0;
  for (const auto& face : mesh_->boundary_faces()) {
    const double c1 = face.distance;
    const double c2 = face.next_distance;
    const double d1 = f.beta(s[face.cell]) - beta_b;
    const double d2 = f.beta(s[face.next_cell]) - beta_b;
    const double inward = (d1 * c2 * c2 - d2 * c1 * c1) / (c1 * c2 * (c2 - c1));
    q -= face.area * inward;
  }
  return impl_->coef * q;
}

double BlockSolver::stored_volume(const std::vector<double>& s) const {
  double v = 0.0;
  const auto& vol = mesh_->volumes();
  for (std::size_t i = 0; i < s.size(); ++i) v += vol[i] * s[i];
  return impl_->porosity * v;
}

double BlockSolver::mean(const std::vector<double>& s) const {
  double v = 0.0;
  const auto& vol = mesh_->volumes();
  for (std::size_t i = 0; i < s.size(); ++i) v += vol[i] * s[i];
  return v / mesh_->mesh_volume();
}

std::vector<double> step_nonlinear(const std::vector<double>& state, double dt, double boundary,
                                   const BlockProblem& problem, const BlockMesh& mesh) {
  BlockSolver solver(mesh, problem.matrix().porosity, problem.diffusion_coefficient(),
                     problem.newton);
  NonlinearDiffusivity f(*problem.model);
  std::vector<double> s = state;
  solver.step(s, dt, boundary, f);
  return s;
}

namespace {

struct Advancer {
  BlockSolver& solver;
  const BlockProblem& problem;
  BlockDiagnostics& diag;

  void advance(std::vector<double>& s, double t0, double t1, const Diffusivity& f, int depth) {
    try {
      const auto rep = solver.step(s, t1 - t0, problem.boundary_value(t1), f);
      diag.newton_iterations += rep.iterations;
      diag.substeps += 1;
      diag.max_residual = std::max(diag.max_residual, rep.residual);
      diag.max_halving_depth = std::max(diag.max_halving_depth, depth);
    } catch (const StepError& e) {
      if (depth >= problem.newton.max_halvings) {
        throw RunError(std::string("block run failed at minimum step: ") + e.what() +
                       " (residual " + std::to_string(e.residual()) + ")");
      }
      const double mid = 0.5 * (t0 + t1);
      advance(s, t0, mid, f, depth + 1);
      advance(s, mid, t1, f, depth + 1);
    }
  }
};

}  // namespace

BlockSolution solve_block(const BlockProblem& problem, const BlockMesh& mesh,
                          const std::vector<const Diffusivity*>& per_interval) {
  problem.validate();
  const auto& grid = problem.time_grid;
  if (per_interval.size() + 1 != grid.size()) {
    throw ParameterError("one diffusivity per time interval is required");
  }
  BlockSolver solver(mesh, problem.matrix().porosity, problem.diffusion_coefficient(),
                     problem.newton);
  BlockSolution sol;
  sol.porosity = problem.matrix().porosity;
  sol.mesh_volume = mesh.mesh_volume();
  sol.delta = problem.delta;
  sol.times = grid;
  std::vector<double> s(mesh.cell_count(), problem.initial_value());
  sol.boundary_values.push_back(problem.boundary_value(grid.front()));
  sol.means.push_back(solver.mean(s));
  if (problem.mesh.store_fields) sol.fields.push_back(s);

  Advancer adv{solver, problem, sol.diagnostics};
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Diffusivity& f = *per_interval[k];
    adv.advance(s, grid[k], grid[k + 1], f, 0);
    const double bc = problem.boundary_value(grid[k + 1]);
    sol.boundary_values.push_back(bc);
    sol.means.push_back(solver.mean(s));
    sol.tpfa_inflow.push_back(solver.tpfa_inflow(s, bc, f));
    sol.gradient_inflow.push_back(solver.gradient_inflow(s, bc, f));
    if (problem.mesh.store_fields) sol.fields.push_back(s);
  }
  return sol;
}

BlockSolution solve_block(const BlockProblem& problem, const BlockMesh& mesh, const Diffusivity& f) {
  const std::size_t intervals = problem.time_grid.empty() ? 0 : problem.time_grid.size() - 1;
  return solve_block(problem, mesh, std::vector<const Diffusivity*>(intervals, &f));
}

ExchangeSeries exchange_from_volume(const BlockSolution& solution, ExchangeMethod method) {
  ExchangeSeries q;
  q.method = method;
  q.delta = solution.delta;
  for (std::size_t k = 0; k + 1 < solution.times.size(); ++k) {
    const double dt = solution.times[k + 1] - solution.times[k];
    q.times.push_back(0.5 * (solution.times[k] + solution.times[k + 1]));
    q.values.push_back(-solution.porosity * (solution.means[k + 1] - solution.means[k]) / dt);
  }
  return q;
}

ExchangeSeries exchange_from_flux(const BlockSolution& solution, ExchangeMethod method) {
  ExchangeSeries q;
  q.method = method;
  q.delta = solution.delta;
  for (std::size_t k = 0; k + 1 < solution.times.size(); ++k) {
    q.times.push_back(0.5 * (solution.times[k] + solution.times[k + 1]));
    q.values.push_back(-solution.gradient_inflow[k] / solution.mesh_volume);
  }
  return q;
}

BlockRun run_trajectory(const BlockProblem& problem) {
  problem.validate();
  const BlockMesh mesh = make_block_mesh(problem);
  NonlinearDiffusivity f(*problem.model);
  BlockRun run;
  run.solution = solve_block(problem, mesh, f);
  run.volume = exchange_from_volume(run.solution, ExchangeMethod::Nonlinear);
  run.flux = exchange_from_flux(run.solution, ExchangeMethod::Nonlinear);
  return run;
}

RefinedRun run_until_agreement(BlockProblem problem, double tolerance, std::size_t max_cells) {
  RefinedRun out;
  for (std::size_t n = problem.mesh.cells_per_axis; n <= max_cells; n *= 2) {
    problem.mesh.cells_per_axis = n;
    out.run = run_trajectory(problem);
    out.cells_per_axis = n;
    if (out.run.volume.empty()) {
      out.agreement = 0.0;
      out.converged = true;
      return out;
    }
    out.agreement = compare_series(out.run.flux, out.run.volume).relative_l2;
    if (out.agreement <= tolerance) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace dualpor
