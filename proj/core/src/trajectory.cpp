#include "dualpor/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dualpor/constitutive.hpp"
#include "dualpor/errors.hpp"
#include "dualpor/units.hpp"

namespace dualpor {

BoundaryTrajectory BoundaryTrajectory::constant(double value) {
  return BoundaryTrajectory(Kind::Constant, {value});
}

BoundaryTrajectory BoundaryTrajectory::ramp(double start, double rate_per_day, double rise) {
  return BoundaryTrajectory(Kind::Ramp, {start, rate_per_day, rise});
}

BoundaryTrajectory BoundaryTrajectory::sine(double mean, double amplitude, double period_days) {
  if (!(period_days > 0.0)) throw ParameterError("sine period must be positive");
  return BoundaryTrajectory(Kind::Sine, {mean, amplitude, period_days});
}

BoundaryTrajectory BoundaryTrajectory::step(double before, double after) {
  return BoundaryTrajectory(Kind::Step, {before, after});
}

double BoundaryTrajectory::operator()(double t) const {
  const double td = units::to_days(t);
  double s = 0.0;
  switch (kind_) {
    case Kind::Constant:
      s = params_[0];
      break;
    case Kind::Ramp:
      s = params_[0] + std::min(params_[1] * td, params_[2]);
      break;
    case Kind::Sine:
      s = params_[0] + params_[1] * std::sin(2.0 * std::numbers::pi * td / params_[2]);
      break;
    case Kind::Step:
      s = t > 0.0 ? params_[1] : params_[0];
      break;
  }
  return std::clamp(s, kSaturationClamp, 1.0);
}

std::string BoundaryTrajectory::describe() const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::Constant:
      return fmt::format("constant value={}", p[0]);
    case Kind::Ramp:
      return fmt::format("ramp start={} rate_per_day={} rise={}", p[0], p[1], p[2]);
    case Kind::Sine:
      return fmt::format("sine mean={} amplitude={} period_days={}", p[0], p[1], p[2]);
    case Kind::Step:
      return fmt::format("step before={} after={}", p[0], p[1]);
  }
  return {};
}

std::vector<double> uniform_time_grid(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0) throw ParameterError("time grid needs horizon > 0 and steps > 0");
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  }
  t.back() = horizon;
  return t;
}

std::vector<double> graded_time_grid(double horizon, double first_dt, double ratio, double max_dt) {
  if (!(horizon > 0.0 && first_dt > 0.0 && ratio >= 1.0 && max_dt >= first_dt)) {
    throw ParameterError("graded time grid: need horizon, first_dt > 0, ratio >= 1, max_dt >= first_dt");
  }
  std::vector<double> t{0.0};
  double dt = first_dt;
  while (t.back() < horizon) {
    double next = t.back() + dt;
    // avoid a sliver step at the end
    if (next > horizon || horizon - next < 0.25 * dt) next = horizon;
    t.push_back(next);
    dt = std::min(dt * ratio, max_dt);
  }
  return t;
}

void validate_time_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) throw ParameterError("time grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ParameterError("time grid must be strictly increasing");
  }
}

std::vector<double> midpoints(const std::vector<double>& grid) {
  std::vector<double> m;
  if (grid.size() < 2) return m;
  m.reserve(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) m.push_back(0.5 * (grid[i] + grid[i + 1]));
  return m;
}

}  // namespace dualpor
