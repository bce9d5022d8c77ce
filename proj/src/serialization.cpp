#include "nwraman/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "nwraman/errors.hpp"

namespace nwraman {

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ValidationError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

}  // namespace

void to_json(json& j, const RcfParams& p) {
  j = json{{"A", p.A},
           {"B", p.B},
           {"C", p.C},
           {"gamma0", p.gamma0},
           {"lattice_a", p.lattice_a},
           {"geometry", to_string(p.geometry)},
           {"quad_nodes", p.quad_nodes}};
}

void from_json(const json& j, RcfParams& p) {
  reject_unknown(j, {"A", "B", "C", "gamma0", "lattice_a", "geometry", "quad_nodes"}, "RcfParams");
  read_opt(j, "A", p.A);
  read_opt(j, "B", p.B);
  read_opt(j, "C", p.C);
  read_opt(j, "gamma0", p.gamma0);
  read_opt(j, "lattice_a", p.lattice_a);
  read_opt(j, "quad_nodes", p.quad_nodes);
  if (auto it = j.find("geometry"); it != j.end()) p.geometry = geometry_from_string(it->get<std::string>());
  p.validate();
}

void to_json(json& j, const MeasurementMeta& m) {
  j = json{{"wavelength_nm", m.wavelength_nm},
           {"source_power_uW", m.source_power_uW},
           {"filter_od", m.filter_od},
           {"catalyst_size_nm", m.catalyst_size_nm ? json(*m.catalyst_size_nm) : json(nullptr)},
           {"label", m.label}};
}

void from_json(const json& j, MeasurementMeta& m) {
  reject_unknown(j, {"wavelength_nm", "source_power_uW", "filter_od", "catalyst_size_nm", "label"},
                 "MeasurementMeta");
  read_opt(j, "wavelength_nm", m.wavelength_nm);
  read_opt(j, "source_power_uW", m.source_power_uW);
  read_opt(j, "filter_od", m.filter_od);
  read_opt(j, "label", m.label);
  if (auto it = j.find("catalyst_size_nm"); it != j.end() && !it->is_null()) {
    m.catalyst_size_nm = it->get<double>();
  }
  m.validate();
}

void to_json(json& j, const PeakFeatures& f) {
  j = json{{"position", f.position}, {"fwhm", f.fwhm}, {"asymmetry", f.asymmetry}, {"amplitude", f.amplitude}};
}

void from_json(const json& j, PeakFeatures& f) {
  reject_unknown(j, {"position", "fwhm", "asymmetry", "amplitude"}, "PeakFeatures");
  f.position = j.at("position").get<double>();
  f.fwhm = j.at("fwhm").get<double>();
  f.asymmetry = j.at("asymmetry").get<double>();
  f.amplitude = j.at("amplitude").get<double>();
}

void to_json(json& j, const LineFit& f) {
  j = json{{"slope", f.slope}, {"intercept", f.intercept}, {"residual_rms", f.residual_rms}};
}

void to_json(json& j, const DiameterDistribution& d) {
  j = json{{"kind", to_string(d.kind())}};
  switch (d.kind()) {
    case DiameterDistribution::Kind::point:
      j["point_nm"] = d.point_nm();
      break;
    case DiameterDistribution::Kind::uniform_interval: {
      const auto [lo, hi] = d.interval_nm();
      j["interval_nm"] = {lo, hi};
      break;
    }
    case DiameterDistribution::Kind::grid:
      j["grid_nm"] = d.grid_nm();
      j["weights"] = d.weights();
      break;
  }
}

DiameterDistribution distribution_from_json(const json& j) {
  reject_unknown(j, {"kind", "point_nm", "interval_nm", "grid_nm", "weights"}, "DiameterDistribution");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "point") return DiameterDistribution::point(j.at("point_nm").get<double>());
  if (kind == "uniform_interval") {
    const auto iv = j.at("interval_nm").get<std::vector<double>>();
    if (iv.size() != 2) throw ValidationError("interval_nm must have two entries");
    return DiameterDistribution::uniform_interval(iv[0], iv[1]);
  }
  if (kind == "grid") {
    return DiameterDistribution::grid(j.at("grid_nm").get<std::vector<double>>(),
                                      j.at("weights").get<std::vector<double>>());
  }
  throw ValidationError("unknown distribution kind '" + kind + "'");
}

void to_json(json& j, const FitReport& r) {
  j = json{{"distribution", r.distribution},
           {"summary", r.distribution.summary()},
           {"scale", r.scale},
           {"offset", r.offset},
           {"sse", r.sse},
           {"n_model_evals", r.n_model_evals},
           {"geometry", to_string(r.geometry)},
           {"warnings", r.warnings}};
  if (r.distribution.kind() == DiameterDistribution::Kind::grid) j["kkt_residual"] = r.kkt_residual;
}

void to_json(json& j, const KappaEstimate& k) {
  j = json{{"kappa", k.kappa},
           {"slope_sample", k.slope_sample},
           {"slope_bulk", k.slope_bulk},
           {"kappa_bulk", k.kappa_bulk}};
}

void from_json(const json& j, KappaEstimate& k) {
  reject_unknown(j, {"kappa", "slope_sample", "slope_bulk", "kappa_bulk"}, "KappaEstimate");
  k.kappa = j.at("kappa").get<double>();
  k.slope_sample = j.at("slope_sample").get<double>();
  k.slope_bulk = j.at("slope_bulk").get<double>();
  k.kappa_bulk = j.at("kappa_bulk").get<double>();
}

void to_json(json& j, const AbsorptionTable& t) {
  j = json::object();
  char key[32];
  for (const auto& [wl, a] : t.entries()) {
    std::snprintf(key, sizeof key, "%.3f", wl);
    j[key] = a;
  }
}

void from_json(const json& j, AbsorptionTable& t) {
  if (!j.is_object()) throw ValidationError("absorption table: expected an object");
  std::map<double, double> entries;
  for (const auto& [key, value] : j.items()) {
    std::size_t used = 0;
    double wl = 0.0;
    try {
      wl = std::stod(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size()) throw ValidationError("absorption table: bad wavelength key '" + key + "'");
    entries[wl] = value.get<double>();
  }
  t = AbsorptionTable(std::move(entries));
}

void RunConfig::validate() const {
  params.validate();
  if (!(kappa_bulk > 0.0)) throw ValidationError("config: kappa_bulk must be > 0");
  if (!(gamma_coeff > 0.0)) throw ValidationError("config: gamma_coeff must be > 0");
  absorption_table.alpha(reference_wavelength_nm);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  reject_unknown(j, {"params", "absorption_table", "reference_wavelength_nm", "gamma_coeff", "kappa_bulk",
                     "output_dir", "q_dimension_ratio", "q_cond"},
                 "RunConfig");
  RunConfig c;
  try {
    if (auto it = j.find("params"); it != j.end()) c.params = it->get<RcfParams>();
    if (auto it = j.find("absorption_table"); it != j.end()) {
      if (it->is_string()) {
        std::filesystem::path table = it->get<std::string>();
        if (table.is_relative()) table = path.parent_path() / table;
        if (!std::filesystem::exists(table)) {
          throw ValidationError("config: absorption table file " + table.string() + " not found");
        }
        c.absorption_table = read_json_file(table).get<AbsorptionTable>();
      } else {
        c.absorption_table = it->get<AbsorptionTable>();
      }
    }
    read_opt(j, "reference_wavelength_nm", c.reference_wavelength_nm);
    read_opt(j, "gamma_coeff", c.gamma_coeff);
    read_opt(j, "kappa_bulk", c.kappa_bulk);
    if (auto it = j.find("output_dir"); it != j.end()) c.output_dir = it->get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  return json{{"params", c.params},
              {"absorption_table", c.absorption_table},
              {"reference_wavelength_nm", c.reference_wavelength_nm},
              {"gamma_coeff", c.gamma_coeff},
              {"kappa_bulk", c.kappa_bulk},
              {"output_dir", c.output_dir.string()}};
}

}  // namespace nwraman
