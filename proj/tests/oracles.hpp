// Test-only reference implementations. Nothing here calls into the library's
// numerical paths, so these stay independent of what they check.
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double lorentzian(double x, double center, double fwhm, double amplitude = 1.0) {
  const double u = 2.0 * (x - center) / fwhm;
  return amplitude / (1.0 + u * u);
}

/// lo, lo + step, ... up to hi inclusive; indices, not accumulation.
inline std::vector<double> axis(double lo, double hi, double step) {
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
  return v;
}

inline std::vector<double> sample(const std::vector<double>& x, double center, double fwhm,
                                  double amplitude = 1.0, double offset = 0.0) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = lorentzian(x[i], center, fwhm, amplitude) + offset;
  return y;
}

/// Eq.-5 style integrand integrated by adaptive Gauss–Kronrod on 100 equal
/// panels. Parameters are passed explicitly rather than via RcfParams.
inline double rcf_adaptive(double omega, double diameter_nm, double A, double B, double C, double gamma0,
                           double lattice_a, bool sphere) {
  using boost::math::quadrature::gauss_kronrod;
  const double pi = std::numbers::pi;
  const auto f = [&](double xi) {
    const double measure = sphere ? 4.0 * pi * xi * xi : 2.0 * pi * xi;
    const double w = std::sqrt(A + B * std::cos(pi * xi)) + C;
    const double r = xi * diameter_nm / lattice_a;
    const double d = omega - w;
    return measure * std::exp(-0.25 * r * r) / (d * d + 0.25 * gamma0 * gamma0);
  };
  double total = 0.0;
  constexpr int panels = 100;
  for (int k = 0; k < panels; ++k) {
    total += gauss_kronrod<double, 31>::integrate(f, double(k) / panels, double(k + 1) / panels, 12, 1e-14);
  }
  return total;
}

inline double boltzmann_ratio(double temperature_k, double nu_tilde, double gamma, double k_b) {
  return gamma * std::exp(-nu_tilde / (k_b * temperature_k));
}

/// Ordinary least squares via the normal equations in raw sums.
inline void ols(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  intercept = (sy - slope * sx) / n;
}

}  // namespace oracle
