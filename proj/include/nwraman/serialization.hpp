#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "nwraman/diameter_fit.hpp"
#include "nwraman/features.hpp"
#include "nwraman/rcf_model.hpp"
#include "nwraman/spectrum.hpp"
#include "nwraman/thermal.hpp"

namespace nwraman {

using json = nlohmann::json;

// Readers reject unknown keys so a typo in a config cannot silently fall
// back to a default. Missing keys keep their defaults.

void to_json(json& j, const RcfParams& p);
void from_json(const json& j, RcfParams& p);

void to_json(json& j, const MeasurementMeta& m);
void from_json(const json& j, MeasurementMeta& m);

void to_json(json& j, const PeakFeatures& f);
void from_json(const json& j, PeakFeatures& f);

void to_json(json& j, const LineFit& f);

void to_json(json& j, const DiameterDistribution& d);
DiameterDistribution distribution_from_json(const json& j);

void to_json(json& j, const FitReport& r);

void to_json(json& j, const KappaEstimate& k);
void from_json(const json& j, KappaEstimate& k);

/// {"514.523": 600, ...}; keys carry three decimals.
void to_json(json& j, const AbsorptionTable& t);
void from_json(const json& j, AbsorptionTable& t);

/// Every parameter a CLI run needs, read from one JSON document.
struct RunConfig {
  RcfParams params;
  AbsorptionTable absorption_table = AbsorptionTable::germanium_default();
  double reference_wavelength_nm = 514.523;
  double gamma_coeff = 1.0;
  double kappa_bulk = kBulkGermaniumKappa;
  std::filesystem::path output_dir = ".";

  void validate() const;
};

/// `absorption_table` may be an inline object or a path to a JSON file,
/// resolved relative to the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
json to_json(const RunConfig& c);

json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; byte-stable for equal input.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace nwraman
