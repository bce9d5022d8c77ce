#pragma once

#include <map>
#include <string>

#include "nwraman/features.hpp"
#include "nwraman/spectrum.hpp"

namespace nwraman {

/// Boltzmann constant in wavenumber units, cm^-1 / K.
inline constexpr double kBoltzmannWavenumber = 0.695035;

/// Thermal conductivity of intrinsic bulk germanium, W/(m K).
inline constexpr double kBulkGermaniumKappa = 59.9;

/// Stokes band and anti-Stokes band of one acquisition. The anti-Stokes
/// band is held at positive shift; use Spectrum::mirrored() on data
/// recorded at negative shift.
struct StokesPair {
  Spectrum stokes;
  Spectrum antistokes;
  MeasurementMeta meta;
};

/// I_AS / I_S from trapezoidal band areas. Both bands must pass
/// extract_features, whose errors propagate.
double stokes_antistokes_ratio(const StokesPair& pair);

enum class TemperatureConvention {
  /// T = -nu / (k_B ln(ratio / gamma)), kelvin.
  boltzmann,
  /// ln(ratio): a temperature-proportional index with no absolute scale.
  paper_linear,
};

double temperature_from_ratio(double ratio, double nu_tilde, double gamma_coeff,
                              TemperatureConvention convention);

/// gamma * exp(-nu / (k_B T)); the forward model temperature_from_ratio inverts.
double boltzmann_ratio(double temperature_k, double nu_tilde, double gamma_coeff = 1.0,
                       double k_b = kBoltzmannWavenumber);

/// |OLS slope| of ln(I_AS/I_S) against delivered power, per uW.
double fit_ratio_slope(const PowerSeries& ln_ratio_vs_power);

struct KappaEstimate {
  double kappa;        // W/(m K)
  double slope_sample; // |d ln ratio / dP| of the sample, per uW
  double slope_bulk;   // same for the bulk reference
  double kappa_bulk;   // W/(m K)

  friend bool operator==(const KappaEstimate&, const KappaEstimate&) = default;
};

/// kappa = kappa_bulk * slope_bulk / slope_sample. A steeper heating slope
/// means the layer conducts heat away less effectively.
KappaEstimate relative_kappa(double slope_sample, double slope_bulk,
                             double kappa_bulk = kBulkGermaniumKappa);

/// Wavelength (nm) -> absorption coefficient (cm^-1). Lookups match keys
/// within 5e-4 nm, i.e. at the 3-decimal precision of the file format.
class AbsorptionTable {
 public:
  AbsorptionTable() = default;
  explicit AbsorptionTable(std::map<double, double> entries);

  /// Germanium at the Ar+ 514.523 nm and Kr+ 633.817 nm lines.
  static AbsorptionTable germanium_default();

  double alpha(double wavelength_nm) const;
  const std::map<double, double>& entries() const noexcept { return entries_; }

 private:
  std::map<double, double> entries_;
};

/// Power that deposits the same heat at `reference_wavelength_nm`:
/// power * alpha(wavelength) / alpha(reference).
double equivalent_absorbed_power(double power_uW, double wavelength_nm, double reference_wavelength_nm,
                                 const AbsorptionTable& table);

}  // namespace nwraman
