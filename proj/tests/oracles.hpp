#pragma once

// Test-only reference computations, deliberately independent of the
// library's closed forms.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

// Composite Simpson over [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Variance of the quadrature that nominally holds `v_main` when the ellipse
// (v_main, v_other) is rotated by a Gaussian angle of RMS sigma.
inline double gaussian_rotated_variance(double v_main, double v_other, double sigma) {
  if (sigma == 0.0) return v_main;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  auto integrand = [&](double th) {
    const double c = std::cos(th);
    const double s = std::sin(th);
    return (v_main * c * c + v_other * s * s) * norm * std::exp(-th * th / (2.0 * sigma * sigma));
  };
  const double span = 12.0 * sigma;
  return simpson(integrand, -span, span);
}

inline double shot_noise_rsn2(double power_w, double wavelength_m) {
  return 2.0 * 6.62607015e-34 * 299792458.0 / wavelength_m / power_w;
}

inline double db(double x) { return 10.0 * std::log10(x); }
inline double lin(double d) { return std::pow(10.0, d / 10.0); }

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

}  // namespace oracle
