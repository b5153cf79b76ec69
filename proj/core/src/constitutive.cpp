#include "dualpor/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dualpor/errors.hpp"

namespace dualpor {

namespace {

constexpr unsigned kMaxDepth = 3;
constexpr double kRelativeTolerance = 1.0e-11;

double clamp_interior(double s) {
  return std::clamp(s, kSaturationClamp, 1.0 - kSaturationClamp);
}

void require_unit_interval(double s, const char* what) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError(std::string(what) + ": saturation " + std::to_string(s) +
                      " outside [0, 1]");
  }
}

// s^{-1/m} - 1 without cancellation near s = 1.
double inverse_power_minus_one(double s, double m) {
  return std::expm1(-std::log(s) / m);
}

}  // namespace

void VanGenuchtenParams::validate() const {
  if (!(n > 1.0)) throw ParameterError("van Genuchten n must exceed 1");
  if (!(p_r > 0.0)) throw ParameterError("van Genuchten P_r must be positive");
}

void FluidPair::validate() const {
  if (!(mu_w > 0.0) || !(mu_n > 0.0)) throw ParameterError("viscosities must be positive");
}

void MediumProps::validate() const {
  if (!(porosity > 0.0 && porosity < 1.0)) throw ParameterError("porosity must lie in (0, 1)");
  if (!(permeability > 0.0)) throw ParameterError("permeability must be positive");
  vg.validate();
}

void ConstitutiveSet::validate() const {
  matrix.validate();
  fracture.validate();
  fluids.validate();
}

double capillary_pressure(double s, const VanGenuchtenParams& vg) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw DomainError("capillary_pressure: saturation " + std::to_string(s) +
                      " outside (0, 1]");
  }
  if (s == 1.0) return 0.0;
  return vg.p_r * std::pow(inverse_power_minus_one(s, vg.m()), 1.0 / vg.n);
}

double capillary_pressure_derivative(double s, const VanGenuchtenParams& vg) {
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError("capillary_pressure_derivative: saturation " + std::to_string(s) +
                      " outside (0, 1)");
  }
  const double m = vg.m();
  const double x = inverse_power_minus_one(s, m);
  // d/ds [P_r x^{1/n}] with dx/ds = -(1/m) s^{-1/m-1} = -(x + 1) / (m s)
  return -vg.p_r / vg.n * std::pow(x, 1.0 / vg.n - 1.0) * (x + 1.0) / (m * s);
}

double capillary_inverse(double p, const VanGenuchtenParams& vg) {
  if (!(p >= 0.0)) {
    throw DomainError("capillary_inverse: negative capillary pressure " + std::to_string(p));
  }
  if (std::isinf(p)) return 0.0;
  return std::exp(-vg.m() * std::log1p(std::pow(p / vg.p_r, vg.n)));
}

double capillary_inverse_derivative(double p, const VanGenuchtenParams& vg) {
  if (!(p >= 0.0)) {
    throw DomainError("capillary_inverse_derivative: negative capillary pressure");
  }
  const double m = vg.m();
  const double r = p / vg.p_r;
  const double rn = std::pow(r, vg.n);
  return -m * vg.n * std::pow(r, vg.n - 1.0) / vg.p_r * std::exp((-m - 1.0) * std::log1p(rn));
}

RelativePermeabilities relative_permeabilities(double s, const VanGenuchtenParams& vg) {
  require_unit_interval(s, "relative_permeabilities");
  const double m = vg.m();
  const double s_pow = std::pow(s, 1.0 / m);
  RelativePermeabilities kr;
  // 1 - (1 - s^{1/m})^m, written to keep accuracy as s -> 0
  const double inner = s_pow >= 1.0 ? 1.0 : -std::expm1(m * std::log1p(-s_pow));
  kr.k_rw = std::sqrt(s) * inner * inner;
  kr.k_rn = s_pow >= 1.0 ? 0.0 : std::sqrt(1.0 - s) * std::pow(1.0 - s_pow, 2.0 * m);
  return kr;
}

RelativePermeabilities relative_permeability_derivatives(double s, const VanGenuchtenParams& vg) {
  require_unit_interval(s, "relative_permeability_derivatives");
  const double sc = clamp_interior(s);
  const double m = vg.m();
  const double u = std::pow(sc, 1.0 / m);
  const double v = 1.0 - u;
  const double du = u / (m * sc);
  const double f = -std::expm1(m * std::log1p(-u));
  const double root = std::sqrt(sc);
  const double root_n = std::sqrt(1.0 - sc);
  RelativePermeabilities d;
  d.k_rw = 0.5 * f * f / root + 2.0 * root * f * m * std::pow(v, m - 1.0) * du;
  d.k_rn = -0.5 * std::pow(v, 2.0 * m) / root_n - 2.0 * m * root_n * std::pow(v, 2.0 * m - 1.0) * du;
  return d;
}

Mobilities mobilities(double s, const VanGenuchtenParams& vg, const FluidPair& fluids) {
  const auto kr = relative_permeabilities(s, vg);
  Mobilities lam;
  lam.wetting = kr.k_rw / fluids.mu_w;
  lam.nonwetting = kr.k_rn / fluids.mu_n;
  lam.total = lam.wetting + lam.nonwetting;
  return lam;
}

double alpha_m(double s, const MediumProps& matrix, const FluidPair& fluids) {
  require_unit_interval(s, "alpha_m");
  const double sc = clamp_interior(s);
  const auto lam = mobilities(sc, matrix.vg, fluids);
  if (lam.total <= 0.0) return 0.0;
  return lam.wetting * lam.nonwetting / lam.total *
         std::abs(capillary_pressure_derivative(sc, matrix.vg));
}

double transfer_saturation(double s_f, const VanGenuchtenParams& matrix,
                           const VanGenuchtenParams& fracture) {
  if (!(s_f > 0.0 && s_f <= 1.0)) {
    throw DomainError("transfer_saturation: fracture saturation " + std::to_string(s_f) +
                      " outside (0, 1]");
  }
  return capillary_inverse(capillary_pressure(s_f, fracture), matrix);
}

double transfer_saturation_derivative(double s_f, const VanGenuchtenParams& matrix,
                                      const VanGenuchtenParams& fracture) {
  if (!(s_f > 0.0 && s_f <= 1.0)) {
    throw DomainError("transfer_saturation_derivative: fracture saturation outside (0, 1]");
  }
  const double sc = clamp_interior(s_f);
  const double p = capillary_pressure(sc, fracture);
  return capillary_inverse_derivative(p, matrix) * capillary_pressure_derivative(sc, fracture);
}

std::vector<double> beta_table_nodes(std::size_t node_count) {
  if (node_count < 16) throw ParameterError("beta table needs at least 16 nodes");
  // [0] + log-graded (eps .. 0.05] + uniform (0.05 .. 0.95) + mirrored log + [1]
  constexpr double kEdge = 0.05;
  const std::size_t n_edge = (node_count - 2) * 5 / 16;
  const std::size_t n_mid = node_count - 2 - 2 * n_edge;
  std::vector<double> nodes;
  nodes.reserve(node_count);
  nodes.push_back(0.0);
  const double lo = std::log(kSaturationClamp);
  const double hi = std::log(kEdge);
  for (std::size_t i = 0; i < n_edge; ++i) {
    nodes.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_edge)));
  }
  for (std::size_t i = 0; i < n_mid; ++i) {
    nodes.push_back(kEdge + (1.0 - 2.0 * kEdge) * static_cast<double>(i) / static_cast<double>(n_mid));
  }
  for (std::size_t i = 0; i < n_edge; ++i) {
    nodes.push_back(1.0 - std::exp(hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(n_edge - 1)));
  }
  nodes.push_back(1.0);
  return nodes;
}

BetaTable::BetaTable(const std::function<double(double)>& integrand, std::size_t node_count)
    : nodes_(beta_table_nodes(node_count)) {
  using boost::math::quadrature::gauss_kronrod;
  const std::size_t n = nodes_.size();
  values_.assign(n, 0.0);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = integrand(nodes_[i]);
  for (std::size_t i = 1; i < n; ++i) {
    const double seg = gauss_kronrod<double, 15>::integrate(integrand, nodes_[i - 1], nodes_[i],
                                                            kMaxDepth, kRelativeTolerance);
    values_[i] = values_[i - 1] + std::max(seg, 0.0);
  }
  slope_lo_.resize(n - 1);
  slope_hi_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = nodes_[i + 1] - nodes_[i];
    const double secant = (values_[i + 1] - values_[i]) / h;
    double d0 = std::max(f[i], 0.0);
    double d1 = std::max(f[i + 1], 0.0);
    if (secant <= 0.0) {
      d0 = d1 = 0.0;
    } else {
      const double a = d0 / secant;
      const double b = d1 / secant;
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        d0 *= tau;
        d1 *= tau;
      }
    }
    slope_lo_[i] = d0;
    slope_hi_[i] = d1;
  }
}

double BetaTable::operator()(double s) const {
  require_unit_interval(s, "beta_m");
  if (s == 0.0) return 0.0;
  if (s == 1.0) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double h = nodes_[i + 1] - nodes_[i];
  const double t = (s - nodes_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[i] + h10 * h * slope_lo_[i] + h01 * values_[i + 1] +
         h11 * h * slope_hi_[i];
}

ConstitutiveModel::ConstitutiveModel(const ConstitutiveSet& set) : set_(set) {
  set_.validate();
  const MediumProps matrix = set_.matrix;
  const FluidPair fluids = set_.fluids;
  table_ = std::make_shared<const BetaTable>(
      [matrix, fluids](double s) { return alpha_m(s, matrix, fluids); });
}

ConstitutiveModel::ConstitutiveModel(const ConstitutiveSet& set, double constant_alpha)
    : set_(set), constant_alpha_(constant_alpha) {
  set_.validate();
  if (!(constant_alpha > 0.0)) throw ParameterError("constant alpha must be positive");
}

ConstitutiveModel ConstitutiveModel::with_constant_alpha(const ConstitutiveSet& set,
                                                         double alpha) {
  return ConstitutiveModel(set, alpha);
}

double ConstitutiveModel::alpha(double s) const {
  if (constant_alpha_) {
    require_unit_interval(s, "alpha_m");
    return *constant_alpha_;
  }
  return alpha_m(s, set_.matrix, set_.fluids);
}

double ConstitutiveModel::beta(double s) const {
  if (constant_alpha_) {
    require_unit_interval(s, "beta_m");
    return *constant_alpha_ * s;
  }
  return (*table_)(s);
}

double ConstitutiveModel::alpha_bar() const {
  return constant_alpha_ ? *constant_alpha_ : table_->total();
}

double ConstitutiveModel::transfer(double s_f) const {
  return transfer_saturation(s_f, set_.matrix.vg, set_.fracture.vg);
}

double ConstitutiveModel::transfer_derivative(double s_f) const {
  return transfer_saturation_derivative(s_f, set_.matrix.vg, set_.fracture.vg);
}

double ConstitutiveModel::alpha_hat(double s_min, double s_max) const {
  if (!(s_min > 0.0 && s_min <= s_max && s_max <= 1.0)) {
    throw DomainError("alpha_hat: need 0 < s_min <= s_max <= 1");
  }
  if (constant_alpha_) return *constant_alpha_;
  const double lo = transfer(s_min);
  const double hi = transfer(s_max);
  // Below this width the difference quotient loses more digits than the
  // midpoint rule it approximates.
  constexpr double kCollapse = 1.0e-9;
  if (hi - lo <= kCollapse) return alpha(0.5 * (lo + hi));
  return (beta(hi) - beta(lo)) / (hi - lo);
}

}  // namespace dualpor
