#pragma once

// Van Genuchten-Mualem constitutive relations for the matrix and fracture
// media, and the derived capillary diffusion functions of the imbibition
// problem: alpha_m, its antiderivative beta_m (Kirchhoff transform), and
// the matrix/fracture saturation transfer map.
//
// Everything here is SI: pressures in Pa, viscosities in Pa*s,
// permeabilities in m^2. alpha_m therefore carries units of 1/s.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace dualpor {

/// Saturations are clamped to [kSaturationClamp, 1 - kSaturationClamp]
/// wherever P_c' is evaluated; P_c' is singular at both ends.
inline constexpr double kSaturationClamp = 1.0e-8;

struct VanGenuchtenParams {
  double p_r = 1.0e5;  ///< reference pressure [Pa]
  double n = 2.0;      ///< shape exponent, n > 1

  double m() const { return 1.0 - 1.0 / n; }
  void validate() const;
};

struct FluidPair {
  double mu_w = 1.0e-3;  ///< wetting viscosity [Pa s]
  double mu_n = 2.0e-3;  ///< non-wetting viscosity [Pa s]

  void validate() const;
};

struct MediumProps {
  double porosity = 0.35;
  double permeability = 1.0e-13;  ///< [m^2]
  VanGenuchtenParams vg;

  void validate() const;
};

/// Matrix and fracture media sharing one fluid pair.
struct ConstitutiveSet {
  MediumProps matrix;
  MediumProps fracture;
  FluidPair fluids;

  void validate() const;
};

struct RelativePermeabilities {
  double k_rw = 0.0;
  double k_rn = 0.0;
};

struct Mobilities {
  double wetting = 0.0;
  double nonwetting = 0.0;
  double total = 0.0;
};

/// P_c(s) = P_r (s^{-1/m} - 1)^{1/n}. Throws DomainError unless s in (0, 1].
double capillary_pressure(double s, const VanGenuchtenParams& vg);

/// dP_c/ds (negative). Throws DomainError unless s in (0, 1).
double capillary_pressure_derivative(double s, const VanGenuchtenParams& vg);

/// s = (1 + (p/P_r)^n)^{-m}. Throws DomainError for p < 0.
double capillary_inverse(double p, const VanGenuchtenParams& vg);

/// ds/dp of capillary_inverse (non-positive).
double capillary_inverse_derivative(double p, const VanGenuchtenParams& vg);

/// Mualem relative permeabilities with zero residual saturations.
RelativePermeabilities relative_permeabilities(double s, const VanGenuchtenParams& vg);

/// d k_rw / ds and d k_rn / ds, with s clamped away from 0 and 1.
RelativePermeabilities relative_permeability_derivatives(double s, const VanGenuchtenParams& vg);

Mobilities mobilities(double s, const VanGenuchtenParams& vg, const FluidPair& fluids);

/// alpha_m(s) = lambda_w lambda_n / lambda |P_c'(s)|, with s clamped away from 0 and 1.
double alpha_m(double s, const MediumProps& matrix, const FluidPair& fluids);

/// Saturation transfer map P(s_f) = P_{c,m}^{-1}(P_{c,f}(s_f)).
double transfer_saturation(double s_f, const VanGenuchtenParams& matrix,
                           const VanGenuchtenParams& fracture);

/// dP/ds_f, evaluated with s_f clamped below 1 - kSaturationClamp.
double transfer_saturation_derivative(double s_f, const VanGenuchtenParams& matrix,
                                      const VanGenuchtenParams& fracture);

/// Tabulated antiderivative of a non-negative integrand on [0, 1].
///
/// Node values are accumulated segment by segment with adaptive
/// Gauss-Kronrod quadrature. Between nodes the table uses cubic Hermite
/// interpolation with the integrand itself as the node slope, limited per
/// segment (Fritsch-Carlson) so the interpolant is nondecreasing.
/// Nodes are log-graded toward both endpoints.
class BetaTable {
 public:
  static constexpr std::size_t kDefaultNodes = 2048;

  explicit BetaTable(const std::function<double(double)>& integrand,
                     std::size_t node_count = kDefaultNodes);

  /// Throws DomainError for s outside [0, 1].
  double operator()(double s) const;
  double total() const { return values_.back(); }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> slope_lo_;  // per segment, left end
  std::vector<double> slope_hi_;  // per segment, right end
};

/// Log-graded node layout used by BetaTable.
std::vector<double> beta_table_nodes(std::size_t node_count);

/// A constitutive set together with its cached beta table.
///
/// Immutable after construction and safe to share between threads.
/// `with_constant_alpha` replaces alpha_m by a constant, which turns the
/// imbibition equation into the linear heat equation (used by tests and
/// linearized runs).
class ConstitutiveModel {
 public:
  explicit ConstitutiveModel(const ConstitutiveSet& set);

  static ConstitutiveModel with_constant_alpha(const ConstitutiveSet& set, double alpha);

  const ConstitutiveSet& set() const { return set_; }
  bool has_constant_alpha() const { return constant_alpha_.has_value(); }

  double alpha(double s) const;
  double beta(double s) const;
  /// Mean of alpha_m over [0, 1]; equals beta(1).
  double alpha_bar() const;

  double transfer(double s_f) const;
  double transfer_derivative(double s_f) const;

  /// Average of alpha_m over [P(s_min), P(s_max)] via the beta difference
  /// quotient; degenerates to alpha_m(P(s_min)) when the range collapses.
  double alpha_hat(double s_min, double s_max) const;

 private:
  ConstitutiveModel(const ConstitutiveSet& set, double constant_alpha);

  ConstitutiveSet set_;
  std::optional<double> constant_alpha_;
  std::shared_ptr<const BetaTable> table_;
};

}  // namespace dualpor
