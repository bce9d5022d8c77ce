#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string_view>

#include "nwraman/diameter_fit.hpp"
#include "nwraman/errors.hpp"
#include "nwraman/features.hpp"
#include "nwraman/rcf_model.hpp"
#include "nwraman/serialization.hpp"
#include "nwraman/thermal.hpp"

namespace nwraman::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out;
  std::string geometry;
  int quad_nodes = 0;
};

struct Preprocess {
  std::string crop;
  double baseline = 0.0;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double parse_number(std::string_view text, const char* what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<double> split_numbers(std::string_view text, char sep, const char* what) {
  std::vector<double> v;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    v.push_back(parse_number(text.substr(start, pos == std::string_view::npos ? pos : pos - start), what));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return v;
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto v = split_numbers(text, ':', what);
  if (v.size() != 2) throw ValidationError(std::string(what) + ": expected lo:hi, got '" + text + "'");
  return {v[0], v[1]};
}

// lo:hi:step, inclusive of hi when it lands on the lattice.
std::vector<double> parse_axis(const std::string& text, const char* what) {
  const auto v = split_numbers(text, ':', what);
  if (v.size() != 3 || !(v[2] > 0.0) || !(v[1] > v[0])) {
    throw ValidationError(std::string(what) + ": expected lo:hi:step with lo < hi and step > 0, got '" + text + "'");
  }
  const auto n = static_cast<std::size_t>(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
  if (n > 10'000'000) throw ValidationError(std::string(what) + ": too many points");
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) axis[i] = v[0] + v[2] * static_cast<double>(i);
  return axis;
}

// "3,4,5" or "lo:hi:step".
std::vector<double> parse_list(const std::string& text, const char* what) {
  if (text.find(':') != std::string::npos) return parse_axis(text, what);
  return split_numbers(text, ',', what);
}

DiameterDistribution parse_mixture(const std::string& text) {
  std::vector<double> d, w;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos == std::string::npos ? pos : pos - start);
    const auto pair = parse_pair(item, "--mixture");
    d.push_back(pair.first);
    w.push_back(pair.second);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return DiameterDistribution::grid(std::move(d), std::move(w));
}

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (!g.geometry.empty()) cfg.params.geometry = geometry_from_string(g.geometry);
  if (g.quad_nodes != 0) cfg.params.quad_nodes = g.quad_nodes;
  if (!g.out.empty()) cfg.output_dir = g.out;
  cfg.validate();
  return cfg;
}

fs::path prepare_output_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

Spectrum preprocess(Spectrum s, const Preprocess& p) {
  if (!p.crop.empty()) {
    const auto [lo, hi] = parse_pair(p.crop, "--crop");
    s = crop_window(s, lo, hi);
  }
  if (p.baseline > 0.0) s = subtract_baseline(s, p.baseline);
  return s;
}

void add_preprocess_options(CLI::App* sub, Preprocess& p) {
  sub->add_option("--crop", p.crop, "Keep only lo:hi (cm^-1)");
  sub->add_option("--baseline", p.baseline, "Subtract a linear baseline fitted to this edge fraction");
}

// ---- simulate ----

struct SimulateArgs {
  std::optional<double> d;
  std::string interval;
  std::string mixture;
  std::string grid = "250:320:0.1";
  std::string name = "simulated";
};

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const int chosen = int(a.d.has_value()) + int(!a.interval.empty()) + int(!a.mixture.empty());
  if (chosen != 1) throw ValidationError("simulate: give exactly one of --d, --interval, --mixture");
  const RunConfig cfg = resolve_config(g);

  DiameterDistribution dist = DiameterDistribution::point(1.0);
  if (a.d) {
    dist = DiameterDistribution::point(*a.d);
  } else if (!a.interval.empty()) {
    const auto [lo, hi] = parse_pair(a.interval, "--interval");
    dist = DiameterDistribution::uniform_interval(lo, hi);
  } else {
    dist = parse_mixture(a.mixture);
  }
  const auto grid = parse_axis(a.grid, "--grid");

  const ModelSpectrumRequest req{grid, dist, cfg.params};
  json warnings = json::array();
  if (auto w = req.coverage_warning()) {
    err << "warning: " << *w << '\n';
    warnings.push_back(*w);
  }
  const Spectrum s = simulate_spectrum(req);

  json features = nullptr;
  try {
    features = extract_features(s);
  } catch (const Error& e) {
    const std::string w = std::string("features unavailable: ") + e.what();
    err << "warning: " << w << '\n';
    warnings.push_back(w);
  }

  const fs::path dir = prepare_output_dir(cfg);
  const fs::path spectrum_path = dir / (a.name + ".txt");
  const fs::path features_path = dir / (a.name + "_features.json");
  const std::vector<std::string> header{
      "simulated RCF spectrum", std::string("geometry: ") + to_string(cfg.params.geometry),
      "distribution: " + dist.summary(), "params: " + json(cfg.params).dump()};
  save_spectrum(spectrum_path, s, header);
  write_json_file(features_path, json{{"distribution", dist},
                                      {"summary", dist.summary()},
                                      {"params", cfg.params},
                                      {"points", s.size()},
                                      {"features", features},
                                      {"warnings", warnings}});

  out << "wrote " << spectrum_path.string() << " (" << s.size() << " points)";
  if (!features.is_null()) {
    out << "; peak " << fmt("%.3f", features["position"].get<double>()) << " cm^-1, fwhm "
        << fmt("%.3f", features["fwhm"].get<double>()) << " cm^-1";
  }
  out << '\n';
  return kExitOk;
}

// ---- fit ----

struct FitArgs {
  std::string file;
  std::string mode = "point";
  std::string d_range = "2:30";
  std::string grid_nm = "3:30:1";
  std::string bulk;
  std::string name = "fit_report";
  Preprocess pre;
};

int cmd_fit(const GlobalOptions& g, const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.mode != "point" && a.mode != "interval" && a.mode != "grid") {
    throw ValidationError("fit: --mode must be point, interval or grid");
  }
  const RunConfig cfg = resolve_config(g);
  const Spectrum measured = preprocess(load_spectrum(a.file), a.pre);
  RcfParams params = cfg.params;
  if (!a.bulk.empty()) params = calibrate_C(preprocess(load_spectrum(a.bulk), a.pre), params);

  json doc{{"input", a.file}, {"mode", a.mode}};
  if (!a.bulk.empty()) doc["bulk_reference"] = a.bulk;
  FitReport report = [&] {
    if (a.mode == "grid") {
      const auto grid = parse_list(a.grid_nm, "--grid-nm");
      doc["grid_nm"] = grid;
      return fit_grid_distribution(measured, params, grid);
    }
    const auto [lo, hi] = parse_pair(a.d_range, "--d-range");
    const DiameterRange range{lo, hi};
    doc["d_range"] = {lo, hi};
    return a.mode == "point" ? fit_single_diameter(measured, params, range)
                             : fit_interval_distribution(measured, params, range);
  }();
  doc["params"] = params;
  doc["report"] = report;

  const fs::path path = prepare_output_dir(cfg) / (a.name + ".json");
  write_json_file(path, doc);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  out << report.distribution.summary() << '\n';
  return kExitOk;
}

// ---- thermal ----

struct ThermalArgs {
  std::string manifest;
  std::string bulk_manifest;
  std::string name = "kappa";
  Preprocess pre;
};

struct ManifestEntry {
  std::string stokes_file;
  std::string antistokes_file;
  MeasurementMeta meta;
};

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  if (!j.is_array()) throw ValidationError(path.string() + ": manifest must be a JSON array");
  std::vector<ManifestEntry> entries;
  try {
    for (const auto& e : j) {
      if (!e.is_object()) throw ValidationError(path.string() + ": manifest entries must be objects");
      for (const auto& [key, _] : e.items()) {
        if (key != "stokes_file" && key != "antistokes_file" && key != "meta") {
          throw ValidationError(path.string() + ": unknown manifest key '" + key + "'");
        }
      }
      ManifestEntry m{e.at("stokes_file").get<std::string>(), e.at("antistokes_file").get<std::string>(), {}};
      if (auto it = e.find("meta"); it != e.end()) m.meta = it->get<MeasurementMeta>();
      entries.push_back(std::move(m));
    }
  } catch (const json::exception& ex) {
    throw ValidationError(path.string() + ": " + ex.what());
  }
  if (entries.size() < 2) {
    throw ValidationError(path.string() + ": need at least 2 power levels, got " + std::to_string(entries.size()));
  }
  return entries;
}

struct SeriesResult {
  json doc;
  double slope;
};

SeriesResult analyse_series(const fs::path& manifest, const RunConfig& cfg, const Preprocess& pre) {
  const auto entries = load_manifest(manifest);
  const fs::path base = manifest.parent_path();
  const auto resolve = [&](const std::string& f) {
    const fs::path p(f);
    return p.is_relative() ? base / p : p;
  };
  std::vector<PowerSeries::Entry> series;
  json points = json::array();
  for (const auto& e : entries) {
    const Spectrum stokes = preprocess(load_spectrum(resolve(e.stokes_file)), pre);
    Spectrum anti = load_spectrum(resolve(e.antistokes_file));
    if (anti.back_wavenumber() <= 0.0) anti = anti.mirrored();
    anti = preprocess(anti, pre);
    const StokesPair pair{stokes, anti, e.meta};
    const double ratio = stokes_antistokes_ratio(pair);
    const double ln_ratio = temperature_from_ratio(ratio, 1.0, cfg.gamma_coeff, TemperatureConvention::paper_linear);
    const double power = equivalent_absorbed_power(e.meta.delivered_power_uW(), e.meta.wavelength_nm,
                                                   cfg.reference_wavelength_nm, cfg.absorption_table);
    const double nu = extract_features(stokes).position;
    json temperature = nullptr;
    if (nu > 0.0 && ratio < cfg.gamma_coeff) {
      temperature = temperature_from_ratio(ratio, nu, cfg.gamma_coeff, TemperatureConvention::boltzmann);
    }
    series.emplace_back(power, ln_ratio);
    points.push_back(json{{"label", e.meta.label},
                          {"stokes_file", e.stokes_file},
                          {"antistokes_file", e.antistokes_file},
                          {"wavelength_nm", e.meta.wavelength_nm},
                          {"delivered_power_uW", e.meta.delivered_power_uW()},
                          {"equivalent_power_uW", power},
                          {"ratio", ratio},
                          {"ln_ratio", ln_ratio},
                          {"stokes_position", nu},
                          {"temperature_K", temperature}});
  }
  const PowerSeries ps(series);
  const LineFit fit = fit_feature_vs_power(ps);
  return {json{{"manifest", manifest.string()}, {"fit", fit}, {"points", points}}, std::abs(fit.slope)};
}

int cmd_thermal(const GlobalOptions& g, const ThermalArgs& a, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(g);
  const auto sample = analyse_series(a.manifest, cfg, a.pre);
  const auto bulk = analyse_series(a.bulk_manifest, cfg, a.pre);
  const KappaEstimate k = relative_kappa(sample.slope, bulk.slope, cfg.kappa_bulk);
  const json doc{{"kappa", k},
                 {"convention", "paper_linear"},
                 {"reference_wavelength_nm", cfg.reference_wavelength_nm},
                 {"sample", sample.doc},
                 {"bulk", bulk.doc}};
  const fs::path path = prepare_output_dir(cfg) / (a.name + ".json");
  write_json_file(path, doc);
  out << "kappa " << fmt("%.3f", k.kappa) << " W/(m K)  slope sample " << fmt("%.6g", k.slope_sample)
      << " /uW, bulk " << fmt("%.6g", k.slope_bulk) << " /uW\n";
  return kExitOk;
}

// ---- features ----

struct FeaturesArgs {
  std::vector<std::string> files;
  std::string powers;
  std::string name = "features";
  Preprocess pre;
};

std::optional<double> sidecar_power(const std::string& file, const RunConfig& cfg) {
  const fs::path meta_path = file + ".meta.json";
  if (!fs::exists(meta_path)) return std::nullopt;
  const auto meta = read_json_file(meta_path).get<MeasurementMeta>();
  return equivalent_absorbed_power(meta.delivered_power_uW(), meta.wavelength_nm, cfg.reference_wavelength_nm,
                                   cfg.absorption_table);
}

int cmd_features(const GlobalOptions& g, const FeaturesArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(g);
  std::vector<std::optional<double>> powers(a.files.size());
  if (!a.powers.empty()) {
    const auto p = split_numbers(a.powers, ',', "--powers");
    if (p.size() != a.files.size()) {
      throw ValidationError("--powers lists " + std::to_string(p.size()) + " values for " +
                            std::to_string(a.files.size()) + " files");
    }
    for (std::size_t i = 0; i < p.size(); ++i) powers[i] = p[i];
  }

  json rows = json::array();
  std::vector<std::pair<double, PeakFeatures>> powered;
  int ok = 0;
  out << "file\tpower_uW\tposition\tfwhm\tasymmetry\tamplitude\n";
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    const std::string& file = a.files[i];
    json row{{"file", file}};
    try {
      if (!powers[i]) powers[i] = sidecar_power(file, cfg);
      const PeakFeatures f = extract_features(preprocess(load_spectrum(file), a.pre));
      row["status"] = "ok";
      row["power_uW"] = powers[i] ? json(*powers[i]) : json(nullptr);
      row["features"] = f;
      if (powers[i]) powered.emplace_back(*powers[i], f);
      ++ok;
      out << file << '\t' << (powers[i] ? fmt("%.6g", *powers[i]) : "-") << '\t' << fmt("%.4f", f.position)
          << '\t' << fmt("%.4f", f.fwhm) << '\t' << fmt("%.4f", f.asymmetry) << '\t' << fmt("%.6g", f.amplitude)
          << '\n';
    } catch (const Error& e) {
      row["status"] = "failed";
      row["error"] = e.what();
      err << file << ": " << e.what() << '\n';
      out << file << "\tfailed\n";
    }
    rows.push_back(row);
  }

  json zero = nullptr;
  if (powered.size() >= 2) {
    const auto fit_of = [&](double PeakFeatures::*field) {
      std::vector<PowerSeries::Entry> e;
      for (const auto& [p, f] : powered) e.emplace_back(p, f.*field);
      return fit_feature_vs_power(PowerSeries(e));
    };
    try {
      const LineFit pos = fit_of(&PeakFeatures::position);
      const LineFit fw = fit_of(&PeakFeatures::fwhm);
      const LineFit as = fit_of(&PeakFeatures::asymmetry);
      zero = json{{"position", pos}, {"fwhm", fw}, {"asymmetry", as}};
      out << "P=0\t0\t" << fmt("%.4f", pos.intercept) << '\t' << fmt("%.4f", fw.intercept) << '\t'
          << fmt("%.4f", as.intercept) << "\t-\n";
    } catch (const Error& e) {
      err << "zero-power extrapolation skipped: " << e.what() << '\n';
    }
  }

  const fs::path path = prepare_output_dir(cfg) / (a.name + ".json");
  write_json_file(path, json{{"rows", rows}, {"zero_power", zero}});
  return ok > 0 ? kExitOk : kExitFailure;
}

bool is_usage_error(const Error& e) {
  return dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const LookupError*>(&e) || dynamic_cast<const InsufficientDataError*>(&e) ||
         dynamic_cast<const RankDeficiencyError*>(&e);
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Raman lineshape simulation, diameter fitting and thermal analysis for nanowires", "nwraman-cli"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--geometry", g.geometry, "sphere3d or column2d");
  app.add_option("--quad-nodes", g.quad_nodes, "Gauss-Legendre nodes for the model integral");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Write a model spectrum and its peak features");
  simulate->add_option("--d", sim.d, "Single diameter, nm");
  simulate->add_option("--interval", sim.interval, "Uniform diameter interval lo:hi, nm");
  simulate->add_option("--mixture", sim.mixture, "Weighted diameters d:w,d:w,...");
  simulate->add_option("--grid", sim.grid, "Raman shift grid lo:hi:step, cm^-1");
  simulate->add_option("--name", sim.name, "Output file stem");

  FitArgs fit;
  auto* fitcmd = app.add_subcommand("fit", "Fit a diameter or diameter distribution to a measured spectrum");
  fitcmd->add_option("file", fit.file, "Two-column spectrum file")->required();
  fitcmd->add_option("--mode", fit.mode, "point, interval or grid");
  fitcmd->add_option("--d-range", fit.d_range, "Diameter search range lo:hi, nm");
  fitcmd->add_option("--grid-nm", fit.grid_nm, "Diameter grid for --mode grid: a,b,c or lo:hi:step");
  fitcmd->add_option("--bulk", fit.bulk, "Bulk reference spectrum used to calibrate C and gamma0");
  fitcmd->add_option("--name", fit.name, "Output file stem");
  add_preprocess_options(fitcmd, fit.pre);

  ThermalArgs th;
  auto* thermal = app.add_subcommand("thermal", "Relative thermal conductivity from Stokes/anti-Stokes series");
  thermal->add_option("--manifest", th.manifest, "Sample manifest (JSON array)")->required();
  thermal->add_option("--bulk-manifest", th.bulk_manifest, "Bulk reference manifest")->required();
  thermal->add_option("--name", th.name, "Output file stem");
  add_preprocess_options(thermal, th.pre);

  FeaturesArgs fe;
  auto* features = app.add_subcommand("features", "Peak features per file and zero-power extrapolation");
  features->add_option("files", fe.files, "Spectrum files")->required();
  features->add_option("--powers", fe.powers, "Delivered powers in uW, one per file, comma separated");
  features->add_option("--name", fe.name, "Output file stem");
  add_preprocess_options(features, fe.pre);

  for (auto* sub : {simulate, fitcmd, thermal, features}) sub->fallthrough();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(g, sim, out, err);
    if (*fitcmd) return cmd_fit(g, fit, out, err);
    if (*thermal) return cmd_thermal(g, th, out, err);
    return cmd_features(g, fe, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e) ? kExitUsage : kExitFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace nwraman::cli
