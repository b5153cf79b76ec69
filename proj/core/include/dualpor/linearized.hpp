#pragma once

// Linearized block models.
//
// clin replaces beta(S) by alpha_bar S, which turns the block equation into
// the heat equation with diffusivity a = delta^2 k_m alpha_bar / Phi_m. Its
// exchange term is a convolution of boundary increments with the kernel
// Phi_m d/dt(mean step response), evaluated here by eigenfunction and
// image series.
//
// vlin uses the running average alpha_hat of alpha_m over the range of
// boundary values seen so far. With tau(t) = int_0^t alpha_hat it is the
// unit-coefficient problem in tau time, scaled back by alpha_hat.

#include <cstddef>
#include <optional>
#include <vector>

#include "dualpor/imbibition.hpp"

namespace dualpor {

/// Mean saturation response of the cube (0, L)^d to a unit boundary step,
/// for the heat equation with diffusivity a:
///
///   mean(t) = 1 - (1 - m1(t))^d,
///   m1(t)   = 1 - (8/pi^2) sum_{odd j <= M} j^-2 exp(-a pi^2 j^2 t / L^2).
///
/// For a t / L^2 below kImageSwitch the 1D factor is summed from the
/// short-time image series instead, which converges where the eigen series
/// would need far more than M modes.
class KernelSeries {
 public:
  static constexpr double kImageSwitch = 0.02;

  KernelSeries(int dimension, double length, double diffusivity, double porosity,
               int max_mode = 99);
  static KernelSeries for_problem(const BlockProblem& problem, int max_mode = 99);

  int dimension() const { return d_; }
  double length() const { return length_; }
  double diffusivity() const { return a_; }
  double porosity() const { return porosity_; }
  int max_mode() const { return max_mode_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& rates() const { return rates_; }

  double mean(double t) const;
  double mean_rate(double t) const;
  /// K(t) = Phi_m d(mean)/dt, positive and decreasing for t > 0.
  double kernel(double t) const { return porosity_ * mean_rate(t); }
  /// Bound on the neglected part of the 1D factor m1 at time t.
  double tail_bound(double t) const;

  /// One-dimensional factor m1 and its derivative.
  double mean_1d(double t) const;
  double mean_rate_1d(double t) const;

 private:
  int d_;
  double length_;
  double a_;
  double porosity_;
  int max_mode_;
  std::vector<double> weights_;  // 8 / (pi^2 j^2)
  std::vector<double> rates_;    // a pi^2 j^2 / L^2
};

/// Constant-coefficient block run: same discretization as the nonlinear
/// run with beta(S) = alpha_bar S.
BlockRun clin_run(const BlockProblem& problem);

/// Exchange series of clin from the kernel series, with boundary data
/// piecewise constant on each interval at its right-endpoint value
/// (the data seen by implicit Euler). Values are per-interval averages
/// at interval midpoints.
ExchangeSeries clin_exchange_convolution(const BlockProblem& problem, const KernelSeries& kernel);

enum class AlphaHatPolicy {
  BeginningOfStep,  ///< running range over S_f(t_0..t_k) for interval (t_k, t_k+1)
  EndOfStep,        ///< running range over S_f(t_0..t_k+1)
};

struct TimeChange {
  std::vector<double> times;       ///< [s]
  std::vector<double> tau;         ///< tau at each node
  std::vector<double> alpha_hat;   ///< per interval
};

TimeChange build_time_change(const BoundaryTrajectory& trajectory, const std::vector<double>& grid,
                             const ConstitutiveModel& model,
                             AlphaHatPolicy policy = AlphaHatPolicy::BeginningOfStep);

enum class VlinPath {
  Direct,      ///< implicit solve of the variable-coefficient problem
  TimeChange,  ///< unit-coefficient solve on the tau grid, scaled by alpha_hat
};

struct VlinOptions {
  VlinPath path = VlinPath::Direct;
  AlphaHatPolicy policy = AlphaHatPolicy::BeginningOfStep;
  /// Replaces every alpha_hat sample by this value.
  std::optional<double> forced_alpha;
};

BlockRun vlin_run(const BlockProblem& problem, const VlinOptions& options = {});

}  // namespace dualpor
