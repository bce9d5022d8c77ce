#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nwraman/diameter_fit.hpp"
#include "nwraman/errors.hpp"
#include "nwraman/features.hpp"
#include "nwraman/rcf_model.hpp"
#include "nwraman/serialization.hpp"
#include "nwraman/thermal.hpp"

namespace py = pybind11;
using namespace nwraman;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::tuple to_arrays(const Spectrum& s) { return py::make_tuple(to_array(s.wavenumbers()), to_array(s.intensities())); }

Spectrum make_spectrum(std::vector<double> w, std::vector<double> y) {
  return Spectrum::from_unsorted(std::move(w), std::move(y));
}

py::object report_dict(const FitReport& r) {
  return py::module_::import("json").attr("loads")(json(r).dump());
}

}  // namespace

PYBIND11_MODULE(_nwraman, m) {
  m.doc() = "Nanowire Raman lineshapes: confinement model, diameter fits, Stokes/anti-Stokes analysis";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<LookupError>(m, "LookupError", base.ptr());
  py::register_exception<NoPeakError>(m, "NoPeakError", base.ptr());
  py::register_exception<IncompletePeakError>(m, "IncompletePeakError", base.ptr());
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", base.ptr());
  py::register_exception<NonphysicalRatioError>(m, "NonphysicalRatioError", base.ptr());
  py::register_exception<NoFitError>(m, "NoFitError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

  py::enum_<Geometry>(m, "Geometry")
      .value("sphere3d", Geometry::sphere3d)
      .value("column2d", Geometry::column2d);

  py::class_<RcfParams>(m, "RcfParams")
      .def(py::init<>())
      .def_readwrite("A", &RcfParams::A)
      .def_readwrite("B", &RcfParams::B)
      .def_readwrite("C", &RcfParams::C)
      .def_readwrite("gamma0", &RcfParams::gamma0)
      .def_readwrite("lattice_a", &RcfParams::lattice_a)
      .def_readwrite("geometry", &RcfParams::geometry)
      .def_readwrite("quad_nodes", &RcfParams::quad_nodes)
      .def("validate", &RcfParams::validate)
      .def("bulk_peak_position", &RcfParams::bulk_peak_position)
      .def("__repr__", [](const RcfParams& p) { return "RcfParams(" + json(p).dump() + ")"; });

  py::class_<DiameterDistribution>(m, "DiameterDistribution")
      .def_static("point", &DiameterDistribution::point, py::arg("diameter_nm"))
      .def_static("uniform_interval", &DiameterDistribution::uniform_interval, py::arg("d_min_nm"),
                  py::arg("d_max_nm"))
      .def_static("grid", &DiameterDistribution::grid, py::arg("grid_nm"), py::arg("weights"))
      .def_property_readonly("kind", [](const DiameterDistribution& d) { return to_string(d.kind()); })
      .def("summary", &DiameterDistribution::summary)
      .def("support", [](const DiameterDistribution& d) {
        std::vector<std::pair<double, double>> out;
        for (const auto& s : d.support()) out.emplace_back(s.diameter_nm, s.weight);
        return out;
      })
      .def("__repr__", [](const DiameterDistribution& d) { return "DiameterDistribution(" + d.summary() + ")"; });

  py::class_<PeakFeatures>(m, "PeakFeatures")
      .def_readonly("position", &PeakFeatures::position)
      .def_readonly("fwhm", &PeakFeatures::fwhm)
      .def_readonly("asymmetry", &PeakFeatures::asymmetry)
      .def_readonly("amplitude", &PeakFeatures::amplitude)
      .def("__repr__", [](const PeakFeatures& f) { return "PeakFeatures(" + json(f).dump() + ")"; });

  py::class_<LineFit>(m, "LineFit")
      .def_readonly("slope", &LineFit::slope)
      .def_readonly("intercept", &LineFit::intercept)
      .def_readonly("residual_rms", &LineFit::residual_rms);

  py::class_<KappaEstimate>(m, "KappaEstimate")
      .def_readonly("kappa", &KappaEstimate::kappa)
      .def_readonly("slope_sample", &KappaEstimate::slope_sample)
      .def_readonly("slope_bulk", &KappaEstimate::slope_bulk)
      .def_readonly("kappa_bulk", &KappaEstimate::kappa_bulk);

  m.def("dispersion_omega", &dispersion_omega, py::arg("xi"), py::arg("params") = RcfParams{});
  m.def("rcf_intensity", &rcf_intensity, py::arg("omega"), py::arg("diameter_nm"), py::arg("params") = RcfParams{});

  m.def(
      "simulate",
      [](std::vector<double> grid, const std::variant<double, DiameterDistribution>& diameter,
         const RcfParams& params) { return to_arrays(simulate_spectrum({std::move(grid), diameter, params})); },
      py::arg("omega_grid"), py::arg("diameter"), py::arg("params") = RcfParams{},
      "Peak-normalized model spectrum; returns (wavenumbers, intensities).");

  m.def(
      "extract_features",
      [](std::vector<double> w, std::vector<double> y) { return extract_features(make_spectrum(std::move(w), std::move(y))); },
      py::arg("wavenumbers"), py::arg("intensities"));

  m.def(
      "subtract_baseline",
      [](std::vector<double> w, std::vector<double> y, double edge_fraction) {
        return to_arrays(subtract_baseline(make_spectrum(std::move(w), std::move(y)), edge_fraction));
      },
      py::arg("wavenumbers"), py::arg("intensities"), py::arg("edge_fraction") = 0.1);

  m.def(
      "fit_feature_vs_power",
      [](std::vector<double> powers, std::vector<double> values) {
        if (powers.size() != values.size()) throw ValidationError("powers and values differ in length");
        std::vector<PowerSeries::Entry> e;
        for (std::size_t i = 0; i < powers.size(); ++i) e.emplace_back(powers[i], values[i]);
        return fit_feature_vs_power(PowerSeries(e));
      },
      py::arg("powers_uW"), py::arg("values"));

  m.def(
      "fit_diameter",
      [](std::vector<double> w, std::vector<double> y, const std::string& mode, std::pair<double, double> d_range,
         std::vector<double> grid_nm, const RcfParams& params) {
        const Spectrum s = make_spectrum(std::move(w), std::move(y));
        FitReport r = [&] {
          if (mode == "point") return fit_single_diameter(s, params, {d_range.first, d_range.second});
          if (mode == "interval") return fit_interval_distribution(s, params, {d_range.first, d_range.second});
          if (mode == "grid") return fit_grid_distribution(s, params, grid_nm);
          throw ValidationError("mode must be point, interval or grid");
        }();
        return report_dict(r);
      },
      py::arg("wavenumbers"), py::arg("intensities"), py::arg("mode") = "point",
      py::arg("d_range") = std::pair<double, double>{2.0, 30.0}, py::arg("grid_nm") = std::vector<double>{},
      py::arg("params") = RcfParams{}, "Least-squares diameter fit; returns the report as a dict.");

  m.def(
      "calibrate_C",
      [](std::vector<double> w, std::vector<double> y, const RcfParams& params) {
        return calibrate_C(make_spectrum(std::move(w), std::move(y)), params);
      },
      py::arg("wavenumbers"), py::arg("intensities"), py::arg("params") = RcfParams{});

  m.def(
      "stokes_antistokes_ratio",
      [](std::vector<double> ws, std::vector<double> ys, std::vector<double> was, std::vector<double> yas) {
        return stokes_antistokes_ratio(
            {make_spectrum(std::move(ws), std::move(ys)), make_spectrum(std::move(was), std::move(yas)), {}});
      },
      py::arg("stokes_w"), py::arg("stokes_y"), py::arg("antistokes_w"), py::arg("antistokes_y"));

  m.def(
      "temperature_from_ratio",
      [](double ratio, double nu, double gamma, const std::string& convention) {
        if (convention != "boltzmann" && convention != "paper_linear") {
          throw ValidationError("convention must be boltzmann or paper_linear");
        }
        return temperature_from_ratio(ratio, nu, gamma,
                                      convention == "boltzmann" ? TemperatureConvention::boltzmann
                                                                : TemperatureConvention::paper_linear);
      },
      py::arg("ratio"), py::arg("nu_tilde"), py::arg("gamma_coeff") = 1.0, py::arg("convention") = "boltzmann");
  m.def("boltzmann_ratio", &boltzmann_ratio, py::arg("temperature_k"), py::arg("nu_tilde"),
        py::arg("gamma_coeff") = 1.0, py::arg("k_b") = kBoltzmannWavenumber);
  m.def("relative_kappa", &relative_kappa, py::arg("slope_sample"), py::arg("slope_bulk"),
        py::arg("kappa_bulk") = kBulkGermaniumKappa);
  m.def(
      "equivalent_absorbed_power",
      [](double power, double wl, double ref, std::optional<std::map<double, double>> table) {
        return equivalent_absorbed_power(power, wl, ref,
                                         table ? AbsorptionTable(*table) : AbsorptionTable::germanium_default());
      },
      py::arg("power_uW"), py::arg("wavelength_nm"), py::arg("reference_wavelength_nm") = 514.523,
      py::arg("table") = py::none());

  m.attr("K_B_WAVENUMBER") = kBoltzmannWavenumber;
  m.attr("KAPPA_BULK_GE") = kBulkGermaniumKappa;
}
