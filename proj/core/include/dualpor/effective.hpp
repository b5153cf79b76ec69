#pragma once

// Effective matrix-fracture sources of the fully homogenized model and
// their convolution quadrature on a time grid t_0 = 0 < t_1 < ... < t_N.
//
// Model I:  Q = -C_m d/dt int_0^t (P(S(u)) - P(S(0))) / sqrt(t - u) du,
//           C_m = 2 d sqrt(Phi_m k_m alpha_bar / pi).
// Model II: the same kernel in the time tau(t) = int_0^t alpha_hat, with
//           C_m = 2 d sqrt(Phi_m k_m / pi).
//
// With S piecewise constant (S^k on (t_{k-1}, t_k]) the kernel integrals are
//   I^n_k = 2 C_m (sqrt(t_n - t_{k-1}) - sqrt(t_n - t_k)),
// and the source over (t_n, t_{n+1}) is
//   Q^{n+1/2} = -(I^{n+1}_{n+1} P(S^{n+1}) - F^n) / dt_n,
//   F^n = sum_{k=0}^n D^n_k P(S^k),
// with D^n_k = I^n_k - I^{n+1}_k for k >= 1 and D^n_0 closing the sum
// sum_k D^n_k = I^{n+1}_{n+1}.

#include <cstddef>
#include <span>
#include <vector>

#include "dualpor/constitutive.hpp"
#include "dualpor/imbibition.hpp"
#include "dualpor/trajectory.hpp"

namespace dualpor {

enum class SourceModel { I, II };

struct EffectiveSourceParams {
  SourceModel model = SourceModel::I;
  int dimension = 2;
  double c_m = 0.0;

  /// C_m = 2 d sqrt(Phi_m k_m alpha_bar / pi).
  static EffectiveSourceParams model1(int dimension, const MediumProps& matrix, double alpha_bar);
  /// C_m = 2 d sqrt(Phi_m k_m / pi), or 2 sqrt(Phi_m k_m / pi) if without_dimension.
  static EffectiveSourceParams model2(int dimension, const MediumProps& matrix,
                                      bool without_dimension = false);
};

/// Kernel integrals on a fixed grid. Coefficients are closed forms evaluated
/// on demand in the rationalized form 2 C dt_{k-1} / (sqrt(.) + sqrt(.)).
class QuadratureTable {
 public:
  /// Throws ParameterError for a non-increasing grid or if some D^n_0 <= 0.
  QuadratureTable(std::vector<double> grid, double c_m);

  const std::vector<double>& grid() const { return grid_; }
  double c_m() const { return c_m_; }
  std::size_t steps() const { return grid_.size() - 1; }
  bool equidistant() const { return equidistant_; }

  /// I^n_k for 1 <= k <= n <= steps().
  double I(std::size_t n, std::size_t k) const;
  /// D^n_k for 0 <= k <= n < steps().
  double D(std::size_t n, std::size_t k) const;
  /// D^n_0 .. D^n_n.
  std::vector<double> d_row(std::size_t n) const;
  /// Convolution weights J_l = I^{l+1}_1 on an equidistant grid.
  double J(std::size_t l) const;

 private:
  std::vector<double> grid_;
  double c_m_;
  bool equidistant_;
};

QuadratureTable build_quadrature(const std::vector<double>& grid, double c_m);

/// F^n = sum_{k=0}^n D^n_k P^k; `p` holds P(S^0) .. P(S^n) (at least n + 1 values).
double history_term(std::span<const double> p, const QuadratureTable& table, std::size_t n);

/// Model I source over (t_n, t_{n+1}); `p` holds P(S^0) .. P(S^{n+1}).
double q_model1(std::span<const double> p, const QuadratureTable& table, std::size_t n);

/// Model II source over (t_n, t_{n+1}).
/// `p` holds P(S^0) .. P(S^{n+1}); `alpha_hat[k - 1]` is alpha_hat^k for
/// k = 1 .. n + 1 (the coefficient on (t_{k-1}, t_k)).
double q_model2(std::span<const double> p, std::span<const double> alpha_hat,
                const std::vector<double>& grid, double c_m, std::size_t n);

/// Model II source split as Q = -(weight * (P^{n+1} - P^0) - history) / dt_n.
/// `weight` = 2 C_m sqrt(alpha_hat^{n+1} dt_n) multiplies the new value;
/// `history` carries the terms k <= n. Both depend on alpha_hat^{n+1}.
struct Model2Split {
  double weight = 0.0;
  double history = 0.0;
};

/// `p` needs P(S^0) .. P(S^n); `alpha_hat` as for q_model2.
Model2Split model2_split(std::span<const double> p, std::span<const double> alpha_hat,
                         const std::vector<double>& grid, double c_m, std::size_t n);

/// alpha_hat^k for k = 1 .. N from fracture saturations S^0 .. S^N using the
/// running range over S^0 .. S^k.
std::vector<double> alpha_hat_history(std::span<const double> fracture_saturation,
                                      const ConstitutiveModel& model);

/// Effective exchange along a prescribed fracture saturation trajectory, one
/// value per grid interval at interval midpoints.
ExchangeSeries effective_exchange(const BoundaryTrajectory& trajectory,
                                  const std::vector<double>& grid, const ConstitutiveModel& model,
                                  const EffectiveSourceParams& params, double delta = 0.0);

}  // namespace dualpor
