#include "dualpor/effective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dualpor/errors.hpp"

namespace dualpor {

EffectiveSourceParams EffectiveSourceParams::model1(int dimension, const MediumProps& matrix,
                                                    double alpha_bar) {
  if (dimension < 1 || dimension > 3) throw ParameterError("dimension must be 1..3");
  EffectiveSourceParams p;
  p.model = SourceModel::I;
  p.dimension = dimension;
  p.c_m = 2.0 * dimension *
          std::sqrt(matrix.porosity * matrix.permeability * alpha_bar / std::numbers::pi);
  return p;
}

EffectiveSourceParams EffectiveSourceParams::model2(int dimension, const MediumProps& matrix,
                                                    bool without_dimension) {
  if (dimension < 1 || dimension > 3) throw ParameterError("dimension must be 1..3");
  EffectiveSourceParams p;
  p.model = SourceModel::II;
  p.dimension = dimension;
  const double factor = without_dimension ? 2.0 : 2.0 * dimension;
  p.c_m = factor * std::sqrt(matrix.porosity * matrix.permeability / std::numbers::pi);
  return p;
}

QuadratureTable::QuadratureTable(std::vector<double> grid, double c_m)
    : grid_(std::move(grid)), c_m_(c_m), equidistant_(true) {
  validate_time_grid(grid_);
  if (grid_.size() < 2) throw ParameterError("quadrature grid needs at least one interval");
  if (!(c_m >= 0.0)) throw ParameterError("kernel constant must be non-negative");
  const double h = grid_[1] - grid_[0];
  for (std::size_t k = 1; k + 1 < grid_.size(); ++k) {
    if (std::abs((grid_[k + 1] - grid_[k]) - h) > 1e-9 * h) {
      equidistant_ = false;
      break;
    }
  }
  if (c_m_ > 0.0) {
    for (std::size_t n = 0; n + 1 < grid_.size(); ++n) {
      if (!(D(n, 0) > 0.0)) {
        throw ParameterError("time grid violates D^n_0 > 0 at step " + std::to_string(n));
      }
    }
  }
}

double QuadratureTable::I(std::size_t n, std::size_t k) const {
  if (k < 1 || k > n || n >= grid_.size()) throw ParameterError("I^n_k needs 1 <= k <= n <= N");
  const double a = grid_[n] - grid_[k - 1];
  const double b = grid_[n] - grid_[k];
  return 2.0 * c_m_ * (grid_[k] - grid_[k - 1]) / (std::sqrt(a) + std::sqrt(b));
}

double QuadratureTable::D(std::size_t n, std::size_t k) const {
  if (k > n || n + 1 >= grid_.size()) throw ParameterError("D^n_k needs 0 <= k <= n < N");
  const double t0 = grid_.front();
  const double dt_n = grid_[n + 1] - grid_[n];
  if (k == 0) {
    // I^{n+1}_{n+1} + sum_k (I^{n+1}_k - I^n_k) telescopes to this
    return 2.0 * c_m_ * dt_n / (std::sqrt(grid_[n + 1] - t0) + std::sqrt(grid_[n] - t0));
  }
  // I^n_k - I^{n+1}_k without cancellation
  const double a = grid_[n] - grid_[k - 1];
  const double b = grid_[n] - grid_[k];
  const double a1 = grid_[n + 1] - grid_[k - 1];
  const double b1 = grid_[n + 1] - grid_[k];
  const double sa = std::sqrt(a), sb = std::sqrt(b), sa1 = std::sqrt(a1), sb1 = std::sqrt(b1);
  const double grow = dt_n * (1.0 / (sa1 + sa) + 1.0 / (sb1 + sb));
  return 2.0 * c_m_ * (grid_[k] - grid_[k - 1]) * grow / ((sa + sb) * (sa1 + sb1));
}

std::vector<double> QuadratureTable::d_row(std::size_t n) const {
  std::vector<double> row(n + 1);
  for (std::size_t k = 0; k <= n; ++k) row[k] = D(n, k);
  return row;
}

double QuadratureTable::J(std::size_t l) const {
  if (!equidistant_) throw ParameterError("J weights need an equidistant grid");
  const double h = grid_[1] - grid_[0];
  const double x = static_cast<double>(l);
  return 2.0 * c_m_ * std::sqrt(h) / (std::sqrt(x + 1.0) + std::sqrt(x));
}

QuadratureTable build_quadrature(const std::vector<double>& grid, double c_m) {
  return QuadratureTable(grid, c_m);
}

double history_term(std::span<const double> p, const QuadratureTable& table, std::size_t n) {
  if (p.size() < n + 1) throw ParameterError("history needs P(S^0) .. P(S^n)");
  double f = 0.0;
  for (std::size_t k = 0; k <= n; ++k) f += table.D(n, k) * p[k];
  return f;
}

double q_model1(std::span<const double> p, const QuadratureTable& table, std::size_t n) {
  if (p.size() < n + 2) throw ParameterError("model I source needs P(S^0) .. P(S^{n+1})");
  // I^{n+1}_{n+1} P^{n+1} - F^n = sum_k D^n_k (P^{n+1} - P^k) by the sum identity
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) acc += table.D(n, k) * (p[n + 1] - p[k]);
  const double dt = table.grid()[n + 1] - table.grid()[n];
  return -acc / dt;
}

Model2Split model2_split(std::span<const double> p, std::span<const double> alpha_hat,
                         const std::vector<double>& grid, double c_m, std::size_t n) {
  if (p.size() < n + 1) throw ParameterError("model II source needs P(S^0) .. P(S^n)");
  if (alpha_hat.size() < n + 1) throw ParameterError("model II source needs alpha_hat^1 .. alpha_hat^{n+1}");
  if (grid.size() < n + 2) throw ParameterError("model II source needs t_0 .. t_{n+1}");
  Model2Split out;
  const double e = alpha_hat[n] * (grid[n + 1] - grid[n]);
  out.weight = 2.0 * c_m * std::sqrt(e);
  // For k <= n the k-th integral shrinks when tau^{n+1} = tau^n + e;
  // x = U^n_k, y = U^n_{k+1} accumulate from the newest interval back.
  double y = 0.0;
  double h = 0.0;
  for (std::size_t k = n; k >= 1; --k) {
    const double w = alpha_hat[k - 1] * (grid[k] - grid[k - 1]);
    const double x = y + w;
    const double sx = std::sqrt(x), sy = std::sqrt(y);
    const double sx1 = std::sqrt(x + e), sy1 = std::sqrt(y + e);
    const double shrink = e * (1.0 / (sx1 + sx) + 1.0 / (sy1 + sy)) / ((sx + sy) * (sx1 + sy1));
    h += w * (p[k] - p[0]) * shrink;
    y = x;
  }
  out.history = 2.0 * c_m * h;
  return out;
}

double q_model2(std::span<const double> p, std::span<const double> alpha_hat,
                const std::vector<double>& grid, double c_m, std::size_t n) {
  if (p.size() < n + 2) throw ParameterError("model II source needs P(S^0) .. P(S^{n+1})");
  const auto split = model2_split(p, alpha_hat, grid, c_m, n);
  const double dt = grid[n + 1] - grid[n];
  return -(split.weight * (p[n + 1] - p[0]) - split.history) / dt;
}

std::vector<double> alpha_hat_history(std::span<const double> fracture_saturation,
                                      const ConstitutiveModel& model) {
  std::vector<double> out;
  if (fracture_saturation.empty()) return out;
  double lo = fracture_saturation[0];
  double hi = lo;
  for (std::size_t k = 1; k < fracture_saturation.size(); ++k) {
    lo = std::min(lo, fracture_saturation[k]);
    hi = std::max(hi, fracture_saturation[k]);
    out.push_back(model.alpha_hat(lo, hi));
  }
  return out;
}

ExchangeSeries effective_exchange(const BoundaryTrajectory& trajectory,
                                  const std::vector<double>& grid, const ConstitutiveModel& model,
                                  const EffectiveSourceParams& params, double delta) {
  validate_time_grid(grid);
  ExchangeSeries q;
  q.method = params.model == SourceModel::I ? ExchangeMethod::EffectiveI : ExchangeMethod::EffectiveII;
  q.delta = delta;
  q.divided_by_delta = true;
  if (grid.size() < 2) return q;
  std::vector<double> s(grid.size());
  std::vector<double> p(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    s[k] = trajectory(grid[k]);
    p[k] = model.transfer(s[k]);
  }
  if (params.model == SourceModel::I) {
    const QuadratureTable table(grid, params.c_m);
    for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
      q.times.push_back(0.5 * (grid[n] + grid[n + 1]));
      q.values.push_back(q_model1(p, table, n));
    }
  } else {
    const auto ah = alpha_hat_history(s, model);
    for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
      q.times.push_back(0.5 * (grid[n] + grid[n + 1]));
      q.values.push_back(q_model2(p, ah, grid, params.c_m, n));
    }
  }
  return q;
}

}  // namespace dualpor
