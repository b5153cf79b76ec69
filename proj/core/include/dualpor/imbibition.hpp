#pragma once

// Local imbibition problem on one matrix block:
//
//   Phi_m dS/dt = delta^2 k_m  Laplace beta(S)   in (0, L)^d, L = 1 - delta,
//   S = P(S_f(t)) on the block boundary,  S(0) = S_m0,
//
// discretized with cell-centered TPFA fluxes of beta on a graded mesh and
// implicit Euler in time. The matrix-fracture exchange term
//
//   Q_w = -Phi_m / |Y| * d/dt int_Y S
//
// is evaluated both from the change of stored volume and from the boundary
// flux.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dualpor/blockmesh.hpp"
#include "dualpor/constitutive.hpp"
#include "dualpor/trajectory.hpp"

namespace dualpor {

enum class ExchangeMethod { Nonlinear, ConstantLinear, VariableLinear, EffectiveI, EffectiveII };

/// Short tags: nlin, clin, vlin, effective-I, effective-II.
std::string method_tag(ExchangeMethod method);
ExchangeMethod parse_method(const std::string& tag);

/// Time series of the wetting exchange term. Values are in 1/s; negative
/// while water moves from the fractures into the block.
struct ExchangeSeries {
  std::vector<double> times;   ///< [s]
  std::vector<double> values;  ///< [1/s], or [1/s] per unit delta if divided_by_delta
  ExchangeMethod method = ExchangeMethod::Nonlinear;
  double delta = 0.0;
  bool divided_by_delta = false;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  /// Copy with values divided by delta (no-op if already divided).
  ExchangeSeries per_delta() const;
};

/// Mesh resolution and layout for block runs.
struct BlockDiscretization {
  std::size_t cells_per_axis = 64;
  GradingParams grading;
  MeshSymmetry symmetry = MeshSymmetry::Full;
  bool store_fields = false;
};

/// Newton controls for implicit block steps.
struct NewtonSettings {
  double tolerance = 1.0e-10;  ///< max-norm residual in saturation units
  int max_iterations = 25;
  int max_halvings = 10;
};

struct BlockProblem {
  std::shared_ptr<const ConstitutiveModel> model;
  double delta = 1.0e-2;
  int dimension = 2;
  /// Uniform initial block saturation; defaults to P(S_f(0)).
  std::optional<double> initial_saturation;
  BoundaryTrajectory trajectory = BoundaryTrajectory::constant(0.5);
  std::vector<double> time_grid;  ///< [s], starts at 0
  BlockDiscretization mesh;
  NewtonSettings newton;

  const MediumProps& matrix() const { return model->set().matrix; }
  double block_length() const { return 1.0 - delta; }
  /// delta^2 k_m, the coefficient in front of the Laplacian.
  double diffusion_coefficient() const;
  /// a = delta^2 k_m alpha_bar / Phi_m, the linearized diffusivity.
  double linear_diffusivity() const;
  double initial_value() const;
  /// P(S_f(t)).
  double boundary_value(double t) const;
  void validate() const;
};

/// Graded block mesh for a problem; the layer follows sqrt(a T).
BlockMesh make_block_mesh(const BlockProblem& problem);

/// The function beta whose Laplacian drives the block equation, and its
/// derivative alpha. Linear instances have beta(s) = c s.
class Diffusivity {
 public:
  virtual ~Diffusivity() = default;
  virtual double beta(double s) const = 0;
  virtual double alpha(double s) const = 0;
  virtual bool is_linear() const { return false; }
};

class NonlinearDiffusivity final : public Diffusivity {
 public:
  explicit NonlinearDiffusivity(const ConstitutiveModel& model) : model_(&model) {}
  double beta(double s) const override { return model_->beta(s); }
  double alpha(double s) const override { return model_->alpha(s); }

 private:
  const ConstitutiveModel* model_;
};

class LinearDiffusivity final : public Diffusivity {
 public:
  explicit LinearDiffusivity(double coefficient) : c_(coefficient) {}
  double beta(double s) const override { return c_ * s; }
  double alpha(double) const override { return c_; }
  bool is_linear() const override { return true; }
  double coefficient() const { return c_; }

 private:
  double c_;
};

struct StepReport {
  int iterations = 0;
  double residual = 0.0;
};

/// Implicit Euler stepper for one block mesh.
class BlockSolver {
 public:
  BlockSolver(const BlockMesh& mesh, double porosity, double coefficient,
              NewtonSettings settings = {});
  ~BlockSolver();
  BlockSolver(BlockSolver&&) noexcept;
  BlockSolver& operator=(BlockSolver&&) noexcept;

  /// One step of length dt with boundary value `boundary` at the new time.
  /// Throws StepError if Newton fails; `s` is left unchanged in that case.
  StepReport step(std::vector<double>& s, double dt, double boundary, const Diffusivity& f);

  /// Rate of wetting volume entering the block through its boundary, from
  /// the TPFA fluxes of beta (consistent with the discrete mass balance).
  double tpfa_inflow(const std::vector<double>& s, double boundary, const Diffusivity& f) const;

  /// Same rate from a second-order one-sided normal derivative of beta(S)
  /// at each boundary face.
  double gradient_inflow(const std::vector<double>& s, double boundary, const Diffusivity& f) const;

  double stored_volume(const std::vector<double>& s) const;
  double mean(const std::vector<double>& s) const;

  const BlockMesh& mesh() const { return *mesh_; }

 private:
  struct Impl;
  const BlockMesh* mesh_;
  std::unique_ptr<Impl> impl_;
};

struct BlockDiagnostics {
  long newton_iterations = 0;
  long substeps = 0;
  int max_halving_depth = 0;
  double max_residual = 0.0;
};

struct BlockSolution {
  std::vector<double> times;            ///< grid nodes [s]
  std::vector<double> boundary_values;  ///< P(S_f) at each node
  std::vector<double> means;            ///< volume mean saturation at each node
  std::vector<double> tpfa_inflow;      ///< per interval, at the end of the interval
  std::vector<double> gradient_inflow;  ///< per interval, at the end of the interval
  std::vector<std::vector<double>> fields;  ///< per node, if stored
  double porosity = 0.0;
  double mesh_volume = 0.0;
  double delta = 0.0;
  BlockDiagnostics diagnostics;
};

/// One implicit Euler step of the nonlinear block equation on `mesh`.
std::vector<double> step_nonlinear(const std::vector<double>& state, double dt, double boundary,
                                   const BlockProblem& problem, const BlockMesh& mesh);

/// Advances a block over problem.time_grid with the given diffusivity.
/// Failed steps are retried with halved substeps down to dt / 2^max_halvings.
BlockSolution solve_block(const BlockProblem& problem, const BlockMesh& mesh, const Diffusivity& f);

/// Variant with a per-interval diffusivity (interval k spans time_grid[k..k+1]).
BlockSolution solve_block(const BlockProblem& problem, const BlockMesh& mesh,
                          const std::vector<const Diffusivity*>& per_interval);

/// Per interval: -Phi_m / |Y| * (stored volume change) / dt, at interval midpoints.
ExchangeSeries exchange_from_volume(const BlockSolution& solution, ExchangeMethod method);
/// Per interval: -(boundary inflow from one-sided gradients) / |Y|, at interval midpoints.
ExchangeSeries exchange_from_flux(const BlockSolution& solution, ExchangeMethod method);

struct BlockRun {
  BlockSolution solution;
  ExchangeSeries volume;
  ExchangeSeries flux;
};

/// Nonlinear block run on the problem's own mesh.
BlockRun run_trajectory(const BlockProblem& problem);

struct RefinedRun {
  BlockRun run;
  std::size_t cells_per_axis = 0;
  double agreement = 0.0;  ///< relative L2 distance of flux vs volume exchange
  bool converged = false;
};

/// Doubles cells_per_axis from the problem's value until volume and flux
/// exchange agree within `tolerance` or `max_cells` is exceeded.
RefinedRun run_until_agreement(BlockProblem problem, double tolerance = 0.01,
                               std::size_t max_cells = 512);

}  // namespace dualpor
