#pragma once

// Fracture saturation histories imposed on matrix blocks, and time grids.
// Times are in seconds; trajectory parameters that carry time are in days.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dualpor {

class BoundaryTrajectory {
 public:
  enum class Kind { Constant, Ramp, Sine, Step };

  /// s(t) = value.
  static BoundaryTrajectory constant(double value);
  /// s(t) = start + min(rate * t_days, rise).
  static BoundaryTrajectory ramp(double start, double rate_per_day, double rise);
  /// s(t) = mean + amplitude * sin(2 pi t_days / period_days).
  static BoundaryTrajectory sine(double mean, double amplitude, double period_days);
  /// s(0) = before, s(t) = after for t > 0.
  static BoundaryTrajectory step(double before, double after);

  /// Fracture saturation at time t [s], clamped to [kSaturationClamp, 1].
  double operator()(double t) const;
  double initial() const { return (*this)(0.0); }

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  std::string describe() const;

 private:
  BoundaryTrajectory(Kind kind, std::vector<double> params)
      : kind_(kind), params_(std::move(params)) {}

  Kind kind_;
  std::vector<double> params_;
};

/// steps + 1 equally spaced instants on [0, horizon].
std::vector<double> uniform_time_grid(double horizon, std::size_t steps);

/// Geometrically growing steps from first_dt by `ratio`, capped at max_dt,
/// ending exactly at horizon.
std::vector<double> graded_time_grid(double horizon, double first_dt, double ratio, double max_dt);

/// Throws ParameterError unless the grid starts at 0 and is strictly increasing.
void validate_time_grid(const std::vector<double>& grid);

/// Interval midpoints of a grid.
std::vector<double> midpoints(const std::vector<double>& grid);

}  // namespace dualpor
