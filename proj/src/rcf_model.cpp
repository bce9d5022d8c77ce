#include "nwraman/rcf_model.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "nwraman/errors.hpp"
#include "nwraman/features.hpp"

namespace nwraman {

namespace {

void require_xi(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw DomainError("zone fraction xi=" + std::to_string(xi) + " outside [0, 1]");
  }
}

void require_diameter(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("diameter must be positive, got " + std::to_string(d));
  }
}

double geometric_measure(double xi, Geometry g) {
  constexpr double pi = std::numbers::pi;
  return g == Geometry::sphere3d ? 4.0 * pi * xi * xi : 2.0 * pi * xi;
}

// Lorentzian + offset residuals for the MINPACK-style LM driver.
struct LorentzianResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::span<const double> x;
  std::span<const double> y;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(x.size()); }

  // p = (center, fwhm, amplitude, offset)
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = 2.0 * (x[i] - p[0]) / p[1];
      r[static_cast<Eigen::Index>(i)] = p[2] / (1.0 + u * u) + p[3] - y[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double u = 2.0 * (x[i] - p[0]) / p[1];
      const double den = 1.0 + u * u;
      const double shape = 1.0 / den;
      const double d_shape_du = -2.0 * u / (den * den);
      j(row, 0) = p[2] * d_shape_du * (-2.0 / p[1]);
      j(row, 1) = p[2] * d_shape_du * (-u / p[1]);
      j(row, 2) = shape;
      j(row, 3) = 1.0;
    }
    return 0;
  }
};

}  // namespace

const char* to_string(Geometry g) {
  return g == Geometry::sphere3d ? "sphere3d" : "column2d";
}

Geometry geometry_from_string(std::string_view name) {
  if (name == "sphere3d") return Geometry::sphere3d;
  if (name == "column2d") return Geometry::column2d;
  throw ValidationError("unknown geometry '" + std::string(name) + "' (sphere3d|column2d)");
}

void RcfParams::validate() const {
  if (!(B > 0.0 && A > B)) throw ValidationError("RcfParams: require A > B > 0");
  if (!(gamma0 > 0.0)) throw ValidationError("RcfParams: gamma0 must be > 0");
  if (!(lattice_a > 0.0)) throw ValidationError("RcfParams: lattice_a must be > 0");
  if (quad_nodes < kMinQuadNodes) {
    throw ValidationError("RcfParams: quad_nodes must be >= " + std::to_string(kMinQuadNodes));
  }
  if (!std::isfinite(A) || !std::isfinite(C) || !std::isfinite(gamma0) || !std::isfinite(lattice_a)) {
    throw ValidationError("RcfParams: non-finite field");
  }
}

double RcfParams::bulk_peak_position() const { return std::sqrt(A + B) + C; }

std::uint64_t RcfParams::fingerprint() const {
  // FNV-1a over the bit patterns of the fields.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (double v : {A, B, C, gamma0, lattice_a}) mix(std::bit_cast<std::uint64_t>(v));
  mix(static_cast<std::uint64_t>(geometry));
  mix(static_cast<std::uint64_t>(quad_nodes));
  return h;
}

double dispersion_omega(double xi, const RcfParams& params) {
  require_xi(xi);
  return std::sqrt(params.A + params.B * std::cos(std::numbers::pi * xi)) + params.C;
}

double confinement_weight(double xi, double diameter_nm, const RcfParams& params) {
  require_xi(xi);
  require_diameter(diameter_nm);
  const double r = xi * diameter_nm / params.lattice_a;
  return std::exp(-0.25 * r * r);
}

double rcf_intensity(double omega, double diameter_nm, const RcfParams& params) {
  return RcfKernel(params).intensity(omega, diameter_nm);
}

RcfKernel::RcfKernel(const RcfParams& params) : params_(params) {
  params_.validate();
  const auto rule = GaussLegendreRule::on_unit_interval(params_.quad_nodes);
  const auto n = static_cast<std::size_t>(rule->size());
  xi_.assign(rule->nodes().begin(), rule->nodes().end());
  measure_.resize(n);
  omega_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    measure_[k] = rule->weights()[k] * geometric_measure(xi_[k], params_.geometry);
    omega_[k] = dispersion_omega(xi_[k], params_);
  }
  half_width_sq_ = 0.25 * params_.gamma0 * params_.gamma0;
}

std::vector<double> RcfKernel::node_weight(double diameter_nm) const {
  require_diameter(diameter_nm);
  const double s = diameter_nm / params_.lattice_a;
  std::vector<double> w(xi_.size());
  for (std::size_t k = 0; k < xi_.size(); ++k) {
    const double r = xi_[k] * s;
    w[k] = measure_[k] * std::exp(-0.25 * r * r);
  }
  return w;
}

double RcfKernel::intensity(double omega, double diameter_nm) const {
  const auto w = node_weight(diameter_nm);
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double d = omega - omega_[k];
    sum += w[k] / (d * d + half_width_sq_);
  }
  return sum;
}

std::vector<double> RcfKernel::profile(std::span<const double> omega_grid, double diameter_nm) const {
  const auto w = node_weight(diameter_nm);
  std::vector<double> out(omega_grid.size(), 0.0);
  const std::size_t m = omega_grid.size();
  const double g2 = half_width_sq_;
  // Node-outer order keeps each grid point's sum in node order while letting
  // the inner loop vectorize across grid points.
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double wk = w[k];
    if (wk == 0.0) continue;
    const double ok = omega_[k];
    double* __restrict o = out.data();
    const double* __restrict g = omega_grid.data();
    for (std::size_t i = 0; i < m; ++i) {
      const double d = g[i] - ok;
      o[i] += wk / (d * d + g2);
    }
  }
  return out;
}

std::vector<double> RcfKernel::normalized_profile(std::span<const double> omega_grid,
                                                  double diameter_nm) const {
  auto p = profile(omega_grid, diameter_nm);
  const double peak = *std::max_element(p.begin(), p.end());
  for (double& v : p) v /= peak;
  return p;
}

std::optional<std::string> ModelSpectrumRequest::coverage_warning() const {
  if (omega_grid.empty()) return std::nullopt;
  const double lo = dispersion_omega(1.0, params) - 10.0 * params.gamma0;
  const double hi = dispersion_omega(0.0, params) + 10.0 * params.gamma0;
  if (omega_grid.front() < lo || omega_grid.back() > hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "omega grid [%.2f, %.2f] extends beyond the recommended band [%.2f, %.2f] cm^-1",
                  omega_grid.front(), omega_grid.back(), lo, hi);
    return std::string(buf);
  }
  return std::nullopt;
}

std::vector<double> mixture_profile(const RcfKernel& kernel, std::span<const double> omega_grid,
                                    std::span<const WeightedDiameter> support) {
  if (support.empty()) throw ValidationError("mixture_profile: empty diameter support");
  if (support.size() == 1) return kernel.normalized_profile(omega_grid, support.front().diameter_nm);
  std::vector<double> mix(omega_grid.size(), 0.0);
  for (const auto& [d, w] : support) {
    const auto p = kernel.normalized_profile(omega_grid, d);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += w * p[i];
  }
  const double peak = *std::max_element(mix.begin(), mix.end());
  for (double& v : mix) v /= peak;
  return mix;
}

Spectrum simulate_spectrum(const ModelSpectrumRequest& req) {
  const RcfKernel kernel(req.params);
  const std::vector<WeightedDiameter> support =
      std::holds_alternative<double>(req.diameter)
          ? std::vector<WeightedDiameter>{{std::get<double>(req.diameter), 1.0}}
          : std::get<DiameterDistribution>(req.diameter).support();
  for (const auto& s : support) require_diameter(s.diameter_nm);
  // Spectrum's constructor validates the grid, so build it before evaluating.
  Spectrum grid(req.omega_grid, std::vector<double>(req.omega_grid.size(), 0.0));
  return grid.with_intensities(mixture_profile(kernel, req.omega_grid, support));
}

LorentzianFit fit_lorentzian(const Spectrum& s) {
  const PeakFeatures seed = extract_features(s);
  Eigen::VectorXd p(4);
  p << seed.position, seed.fwhm, seed.amplitude, 0.0;

  LorentzianResiduals f{s.wavenumbers(), s.intensities()};
  Eigen::LevenbergMarquardt<LorentzianResiduals> lm(f);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !p.allFinite() ||
      !(std::abs(p[1]) > 0.0)) {
    throw NoFitError("Lorentzian fit did not converge");
  }
  return {p[0], std::abs(p[1]), p[2], p[3]};
}

RcfParams calibrate_C(const Spectrum& bulk_reference, const RcfParams& params_without_C) {
  const LorentzianFit fit = fit_lorentzian(bulk_reference);
  RcfParams out = params_without_C;
  out.C = fit.center - std::sqrt(out.A + out.B);
  out.gamma0 = fit.fwhm;
  out.validate();
  return out;
}

}  // namespace nwraman
