#include "nwraman/thermal.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "nwraman/errors.hpp"

namespace nwraman {

double stokes_antistokes_ratio(const StokesPair& pair) {
  extract_features(pair.stokes);
  extract_features(pair.antistokes);
  const double stokes = integrated_area(pair.stokes);
  if (!(stokes > 0.0)) throw NoPeakError("Stokes band has nonpositive integrated area");
  return integrated_area(pair.antistokes) / stokes;
}

double boltzmann_ratio(double temperature_k, double nu_tilde, double gamma_coeff, double k_b) {
  if (!(temperature_k > 0.0)) throw DomainError("temperature must be > 0 K");
  return gamma_coeff * std::exp(-nu_tilde / (k_b * temperature_k));
}

double temperature_from_ratio(double ratio, double nu_tilde, double gamma_coeff,
                              TemperatureConvention convention) {
  if (!(ratio > 0.0)) throw DomainError("intensity ratio must be > 0");
  if (!(gamma_coeff > 0.0)) throw DomainError("gamma coefficient must be > 0");
  if (!(nu_tilde > 0.0)) throw DomainError("phonon wavenumber must be > 0");
  if (convention == TemperatureConvention::paper_linear) return std::log(ratio);
  const double l = std::log(ratio / gamma_coeff);
  if (!(l < 0.0)) {
    throw NonphysicalRatioError("anti-Stokes/Stokes ratio " + std::to_string(ratio) +
                                " is not below gamma " + std::to_string(gamma_coeff));
  }
  return -nu_tilde / (kBoltzmannWavenumber * l);
}

double fit_ratio_slope(const PowerSeries& ln_ratio_vs_power) {
  return std::abs(fit_feature_vs_power(ln_ratio_vs_power).slope);
}

KappaEstimate relative_kappa(double slope_sample, double slope_bulk, double kappa_bulk) {
  if (!(slope_sample > 0.0) || !(slope_bulk > 0.0)) {
    throw DomainError("relative_kappa: slopes must be > 0");
  }
  if (!(kappa_bulk > 0.0)) throw DomainError("relative_kappa: bulk conductivity must be > 0");
  return {kappa_bulk * (slope_bulk / slope_sample), slope_sample, slope_bulk, kappa_bulk};
}

AbsorptionTable::AbsorptionTable(std::map<double, double> entries) : entries_(std::move(entries)) {
  for (const auto& [wl, a] : entries_) {
    if (!(wl > 0.0)) throw ValidationError("absorption table: wavelengths must be > 0");
    if (!(a > 0.0)) throw ValidationError("absorption table: alpha must be > 0");
  }
}

AbsorptionTable AbsorptionTable::germanium_default() {
  return AbsorptionTable({{514.523, 600.0}, {633.817, 150.0}});
}

double AbsorptionTable::alpha(double wavelength_nm) const {
  auto it = entries_.lower_bound(wavelength_nm - 5e-4);
  if (it == entries_.end() || it->first > wavelength_nm + 5e-4) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "no absorption coefficient for %.3f nm", wavelength_nm);
    throw LookupError(buf);
  }
  return it->second;
}

double equivalent_absorbed_power(double power_uW, double wavelength_nm, double reference_wavelength_nm,
                                 const AbsorptionTable& table) {
  if (!(power_uW >= 0.0)) throw DomainError("power must be >= 0");
  return power_uW * (table.alpha(wavelength_nm) / table.alpha(reference_wavelength_nm));
}

}  // namespace nwraman
