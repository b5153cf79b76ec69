#pragma once

// Cell-centered finite volumes for the effective fracture system
//
//    Phi_f dS/dt - div(k* lambda_w(S) grad P_w) =  Q
//   -Phi_f dS/dt - div(k* lambda_n(S) grad P_n) = -Q
//    P_n - P_w = P_c,f(S)
//
// with Q the model I or model II memory source. Two-point fluxes,
// phase-by-phase upwinding, implicit Euler, Newton on (S, P_n).

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dualpor/constitutive.hpp"
#include "dualpor/effective.hpp"

namespace dualpor {

enum class BoundaryKind { NoFlow, Dirichlet, Injection };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::NoFlow;
  double saturation = 0.0;     ///< Dirichlet
  double nonwetting_pressure = 0.0;  ///< Dirichlet [Pa]
  double wetting_flux = 0.0;   ///< Injection, inflow per unit face area [m/s]

  static BoundaryCondition no_flow() { return {}; }
  static BoundaryCondition dirichlet(double s, double p_n) {
    return {BoundaryKind::Dirichlet, s, p_n, 0.0};
  }
  static BoundaryCondition injection(double flux) {
    return {BoundaryKind::Injection, 0.0, 0.0, flux};
  }
};

/// Sides of the rectangle: 0 = x-, 1 = x+, 2 = y-, 3 = y+.
enum Side : int { XMinus = 0, XPlus = 1, YMinus = 2, YPlus = 3 };

struct GridFace {
  std::size_t a = 0;
  std::size_t b = 0;
  double transmissibility = 0.0;  ///< area / center distance
};

struct GridBoundaryFace {
  std::size_t cell = 0;
  int side = 0;
  double area = 0.0;
  double transmissibility = 0.0;  ///< area / (center to face distance)
};

/// Uniform Cartesian grid of a line (d = 1) or rectangle (d = 2),
/// lexicographic indexing with x fastest.
class StructuredGrid {
 public:
  static StructuredGrid line(std::size_t nx, double lx);
  static StructuredGrid rectangle(std::size_t nx, std::size_t ny, double lx, double ly);

  int dimension() const { return dimension_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t cell_count() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double volume() const { return dx_ * dy_; }
  std::array<double, 2> center(std::size_t cell) const;
  const std::vector<GridFace>& faces() const { return faces_; }
  const std::vector<GridBoundaryFace>& boundary_faces() const { return boundary_faces_; }
  const std::vector<std::vector<std::size_t>>& neighbours() const { return neighbours_; }

 private:
  void build();

  int dimension_ = 1;
  std::size_t nx_ = 0;
  std::size_t ny_ = 1;
  double dx_ = 0.0;
  double dy_ = 1.0;
  std::vector<GridFace> faces_;
  std::vector<GridBoundaryFace> boundary_faces_;
  std::vector<std::vector<std::size_t>> neighbours_;
};

struct EffectiveParams {
  std::shared_ptr<const ConstitutiveModel> model;  ///< matrix, fracture, fluids
  double fracture_porosity = 0.01;
  double k_star = 0.0;  ///< k_f (d - 1) / d
  EffectiveSourceParams source;

  /// k* = k_f (d - 1) / d.
  static double k_star_from(double k_f, int dimension);
  void validate() const;
};

struct EffectiveState {
  std::vector<double> saturation;
  std::vector<double> nonwetting_pressure;
  std::vector<double> wetting_pressure;  ///< P_n - P_c,f(S)
  // memory of the source, per time level then per cell
  std::vector<double> times;
  std::vector<std::vector<double>> transfer_history;    ///< P(S^k)
  std::vector<std::vector<double>> saturation_history;  ///< S^k (model II ranges)
  std::vector<std::vector<double>> alpha_hat_history;   ///< alpha_hat^k, k >= 1
  std::vector<double> running_min;
  std::vector<double> running_max;

  std::size_t step() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Uniform initial state at time 0 with an empty source memory.
EffectiveState initial_state(const StructuredGrid& grid, const EffectiveParams& params,
                             double saturation, double nonwetting_pressure);

struct FaceMobility {
  double wetting = 0.0;
  double nonwetting = 0.0;
  std::size_t wetting_from = 0;     ///< cell providing the wetting mobility
  std::size_t nonwetting_from = 0;  ///< cell providing the nonwetting mobility
};

/// Phase-by-phase upstream mobilities on interior faces; on a tie the lower
/// cell index is upstream.
std::vector<FaceMobility> upwind_mobilities(const StructuredGrid& grid,
                                            const std::vector<double>& saturation,
                                            const std::vector<double>& wetting_pressure,
                                            const std::vector<double>& nonwetting_pressure,
                                            const ConstitutiveModel& model);

struct NewtonControls {
  double tolerance = 1.0e-10;  ///< max-norm scaled residual
  int max_iterations = 30;
  double max_saturation_change = 0.2;  ///< per iteration
  double clamp = kSaturationClamp;
};

/// Residual and Jacobian of one implicit step. Unknowns are interleaved
/// (S_0, P_n,0, S_1, P_n,1, ...); equations are (wetting, nonwetting) per
/// cell, each scaled by dt / (Phi_f V).
class EffectiveStepSystem {
 public:
  EffectiveStepSystem(const StructuredGrid& grid, const EffectiveParams& params,
                      const std::array<BoundaryCondition, 4>& boundary, const EffectiveState& state,
                      double dt);
  ~EffectiveStepSystem();
  EffectiveStepSystem(EffectiveStepSystem&&) noexcept;

  std::size_t unknowns() const;
  /// Scaled residual at x.
  std::vector<double> residual(const std::vector<double>& x) const;
  /// Residual and Jacobian (the latter neglects the dependence of
  /// alpha_hat^{n+1} on S^{n+1} in model II).
  std::vector<double> assemble(const std::vector<double>& x) const;
  /// Source Q per cell at x [1/s].
  std::vector<double> sources(const std::vector<double>& x) const;
  /// Per cell (wetting, nonwetting) inflow through the outer boundary at x [m^3/s].
  std::vector<std::array<double, 2>> boundary_inflow(const std::vector<double>& x) const;

  /// Solves J dx = -r for the last assembled Jacobian.
  std::vector<double> solve_last(const std::vector<double>& r) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
  std::size_t active_clamps = 0;
};

/// Damped Newton for one step. S is clamped into [clamp, 1 - clamp] after
/// each update; clamps still active at convergence are reported. Throws
/// StepError on failure. `x` holds the interleaved unknowns.
NewtonReport newton_step(const EffectiveStepSystem& system, std::vector<double>& x,
                         const NewtonControls& controls = {});

struct MassBalance {
  double time = 0.0;
  double dt = 0.0;
  double wetting_accumulation = 0.0;   ///< sum Phi V dS
  double wetting_source = 0.0;         ///< dt sum V Q
  double wetting_boundary = 0.0;       ///< dt * boundary inflow
  double nonwetting_accumulation = 0.0;
  double nonwetting_source = 0.0;
  double nonwetting_boundary = 0.0;
  double wetting_imbalance = 0.0;      ///< |accumulation - source - boundary| / total pore volume
  double nonwetting_imbalance = 0.0;
  double max_capillary_defect = 0.0;   ///< max |P_n - P_w - P_c,f(S)| / max(P_c,f(S), 1 Pa)
  int newton_iterations = 0;
  double residual = 0.0;
  std::size_t active_clamps = 0;
  double min_saturation = 1.0;
  double max_saturation = 0.0;
};

/// Advances one implicit step, appending the new level to the memory.
MassBalance advance_effective(const StructuredGrid& grid, const EffectiveParams& params,
                              const std::array<BoundaryCondition, 4>& boundary,
                              EffectiveState& state, double dt,
                              const NewtonControls& controls = {});

struct EffectiveRunConfig {
  StructuredGrid grid = StructuredGrid::line(4, 1.0);
  EffectiveParams params;
  std::array<BoundaryCondition, 4> boundary{};
  double initial_saturation = 0.2;
  double initial_nonwetting_pressure = 1.0e5;
  double horizon = 0.0;  ///< [s]
  double dt = 0.0;       ///< [s]
  NewtonControls newton;
  int max_dt_cuts = 8;
  /// Output snapshot every this many steps (0: only the final state).
  std::size_t snapshot_every = 0;
  /// If set, saturations follow this function of time instead of being
  /// solved for; only the source memory is advanced.
  std::function<double(double)> prescribed_saturation;
};

struct Snapshot {
  double time = 0.0;
  std::vector<double> saturation;
  std::vector<double> wetting_pressure;
  std::vector<double> nonwetting_pressure;
};

struct EffectiveRunResult {
  EffectiveState state;
  std::vector<MassBalance> balance;
  std::vector<Snapshot> snapshots;
  /// Per step, the cell-0 source Q^{n+1/2} [1/s] at interval midpoints.
  ExchangeSeries cell0_source;
};

EffectiveRunResult run_effective(const EffectiveRunConfig& config);

void write_snapshot_csv(std::ostream& os, const StructuredGrid& grid, const Snapshot& snap);
void write_mass_balance_csv(std::ostream& os, const std::vector<MassBalance>& balance);

}  // namespace dualpor
