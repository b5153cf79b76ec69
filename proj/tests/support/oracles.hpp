#pragma once

// Reference formulas written out independently of the library.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

struct Vg {
  double p_r;
  double n;
  double m() const { return 1.0 - 1.0 / n; }
};

inline double pc(double s, Vg vg) { return vg.p_r * std::pow(std::pow(s, -1.0 / vg.m()) - 1.0, 1.0 / vg.n); }

inline double pc_inverse(double p, Vg vg) { return std::pow(1.0 + std::pow(p / vg.p_r, vg.n), -vg.m()); }

inline double dpc(double s, Vg vg) {
  const double m = vg.m();
  const double u = std::pow(s, -1.0 / m) - 1.0;
  return vg.p_r / vg.n * std::pow(u, 1.0 / vg.n - 1.0) * (-1.0 / m) * std::pow(s, -1.0 / m - 1.0);
}

inline double krw(double s, Vg vg) {
  const double m = vg.m();
  const double inner = 1.0 - std::pow(1.0 - std::pow(s, 1.0 / m), m);
  return std::sqrt(s) * inner * inner;
}

inline double krn(double s, Vg vg) {
  const double m = vg.m();
  return std::sqrt(1.0 - s) * std::pow(1.0 - std::pow(s, 1.0 / m), 2.0 * m);
}

inline double alpha(double s, Vg vg, double mu_w, double mu_n) {
  if (s <= 1.0e-100 || s >= 1.0) return 0.0;
  const double lw = krw(s, vg) / mu_w;
  const double ln = krn(s, vg) / mu_n;
  if (lw + ln <= 0.0) return 0.0;
  return lw * ln / (lw + ln) * std::abs(dpc(s, vg));
}

/// int_0^s alpha by tanh-sinh quadrature.
inline double beta(double s, Vg vg, double mu_w, double mu_n) {
  if (s <= 0.0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([&](double x) { return alpha(x, vg, mu_w, mu_n); }, 0.0, s, 1.0e-13);
}

/// 1D mean response of (0, L) to a unit boundary step for u_t = a u_xx.
inline double heat_mean_1d(double t, double a, double length, int modes = 20001) {
  if (t <= 0.0) return 0.0;
  double sum = 0.0;
  for (int j = 1; j <= modes; j += 2) {
    sum += std::exp(-a * std::numbers::pi * std::numbers::pi * j * j * t / (length * length)) /
           (static_cast<double>(j) * j);
  }
  return 1.0 - 8.0 / (std::numbers::pi * std::numbers::pi) * sum;
}

/// Mean response of the cube (0, L)^d: the product of d independent 1D deficits.
inline double heat_mean(double t, double a, double length, int d) {
  return 1.0 - std::pow(1.0 - heat_mean_1d(t, a, length), d);
}

/// Closed form of the kernel integral I^n_k on grid t.
template <class Grid>
double kernel_integral(const Grid& t, std::size_t n, std::size_t k, double c) {
  return 2.0 * c * (std::sqrt(t[n] - t[k - 1]) - std::sqrt(t[n] - t[k]));
}

inline double relative(double a, double b) {
  if (b == 0.0) return std::abs(a);
  return std::abs(a - b) / std::abs(b);
}

}  // namespace oracle
