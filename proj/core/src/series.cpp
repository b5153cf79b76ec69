#include <cmath>
#include <numbers>

#include "dualpor/errors.hpp"
#include "dualpor/linearized.hpp"

namespace dualpor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr int kMaxImages = 64;

// Integrated complementary error function.
double ierfc(double x) { return std::exp(-x * x) * kInvSqrtPi - x * std::erfc(x); }

}  // namespace

KernelSeries::KernelSeries(int dimension, double length, double diffusivity, double porosity,
                           int max_mode)
    : d_(dimension), length_(length), a_(diffusivity), porosity_(porosity), max_mode_(max_mode) {
  if (dimension < 1 || dimension > 3) throw ParameterError("kernel series dimension must be 1..3");
  if (!(length > 0.0 && diffusivity > 0.0 && porosity > 0.0)) {
    throw ParameterError("kernel series needs positive length, diffusivity and porosity");
  }
  if (max_mode < 1) throw ParameterError("kernel series needs at least one mode");
  for (int j = 1; j <= max_mode; j += 2) {
    const double jj = static_cast<double>(j) * static_cast<double>(j);
    weights_.push_back(8.0 / (kPi * kPi * jj));
    rates_.push_back(a_ * kPi * kPi * jj / (length_ * length_));
  }
}

KernelSeries KernelSeries::for_problem(const BlockProblem& problem, int max_mode) {
  return KernelSeries(problem.dimension, problem.block_length(), problem.linear_diffusivity(),
                      problem.matrix().porosity, max_mode);
}

double KernelSeries::mean_1d(double t) const {
  if (t <= 0.0) return 0.0;
  const double x = a_ * t / (length_ * length_);
  if (x < kImageSwitch) {
    const double u = std::sqrt(a_ * t);
    double sum = kInvSqrtPi;
    for (int k = 1; k <= kMaxImages; ++k) {
      const double term = ierfc(k * length_ / (2.0 * u));
      if (term == 0.0) break;
      sum += (k % 2 == 0 ? 2.0 : -2.0) * term;
    }
    return 4.0 * u / length_ * sum;
  }
  double deficit = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) deficit += weights_[i] * std::exp(-rates_[i] * t);
  return 1.0 - deficit;
}

double KernelSeries::mean_rate_1d(double t) const {
  if (t <= 0.0) throw DomainError("kernel rate is singular at t = 0");
  const double x = a_ * t / (length_ * length_);
  if (x < kImageSwitch) {
    double sum = 1.0;
    for (int k = 1; k <= kMaxImages; ++k) {
      const double term = std::exp(-static_cast<double>(k * k) * length_ * length_ / (4.0 * a_ * t));
      if (term == 0.0) break;
      sum += (k % 2 == 0 ? 2.0 : -2.0) * term;
    }
    return 2.0 / length_ * std::sqrt(a_ / (kPi * t)) * sum;
  }
  double rate = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    rate += weights_[i] * rates_[i] * std::exp(-rates_[i] * t);
  }
  return rate;
}

double KernelSeries::mean(double t) const {
  const double deficit = 1.0 - mean_1d(t);
  return 1.0 - std::pow(deficit, d_);
}

double KernelSeries::mean_rate(double t) const {
  const double deficit = 1.0 - mean_1d(t);
  return d_ * std::pow(deficit, d_ - 1) * mean_rate_1d(t);
}

double KernelSeries::tail_bound(double t) const {
  if (t <= 0.0) return 0.0;
  const double x = a_ * t / (length_ * length_);
  if (x < kImageSwitch) {
    const double u = std::sqrt(a_ * t);
    for (int k = 1; k <= kMaxImages; ++k) {
      const double term = ierfc(k * length_ / (2.0 * u));
      if (term == 0.0) return 0.0;
      if (k == kMaxImages) return 8.0 * u / length_ * term;
    }
    return 0.0;
  }
  const int next = max_mode_ % 2 == 0 ? max_mode_ + 1 : max_mode_ + 2;
  return 8.0 / (kPi * kPi) * std::exp(-kPi * kPi * next * next * x) / max_mode_;
}

}  // namespace dualpor
