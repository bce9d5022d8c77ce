#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nwraman/distribution.hpp"
#include "nwraman/quadrature.hpp"
#include "nwraman/spectrum.hpp"

namespace nwraman {

/// Integration measure over the Brillouin-zone fraction: 4*pi*xi^2 for a
/// spherical shell, 2*pi*xi for a column confined in two dimensions.
enum class Geometry { sphere3d, column2d };

const char* to_string(Geometry g);
Geometry geometry_from_string(std::string_view name);

/// Parameters of the phonon-confinement lineshape.
///
/// Dispersion is omega(xi) = sqrt(A + B cos(pi xi)) + C with xi = q / (2 pi / a)
/// the zone fraction, so the zone boundary sits at xi = 1. Defaults are the
/// germanium optical branch constants, the Ge lattice constant, and a 3 cm^-1
/// reference linewidth to be replaced by calibrate_C when a bulk spectrum
/// exists.
struct RcfParams {
  double A = 0.69e5;         // cm^-2
  double B = 0.195e5;        // cm^-2
  double C = 0.0;            // cm^-1
  double gamma0 = 3.0;       // cm^-1
  double lattice_a = 0.5658; // nm
  Geometry geometry = Geometry::sphere3d;
  int quad_nodes = 2048;

  static constexpr int kMinQuadNodes = 64;

  /// Throws ValidationError unless A > B > 0, gamma0 > 0, lattice_a > 0 and
  /// quad_nodes >= kMinQuadNodes.
  void validate() const;

  /// Large-diameter limit of the peak position, omega(0).
  double bulk_peak_position() const;

  /// Stable 64-bit digest of every field, used as a cache key component.
  std::uint64_t fingerprint() const;

  friend bool operator==(const RcfParams&, const RcfParams&) = default;
};

double dispersion_omega(double xi, const RcfParams& params);

/// |C(0,q)|^2 = exp(-xi^2 D^2 / (4 a^2)).
double confinement_weight(double xi, double diameter_nm, const RcfParams& params);

/// Single-point lineshape value; see RcfKernel for whole profiles.
double rcf_intensity(double omega, double diameter_nm, const RcfParams& params);

/// Precomputed quadrature state for one parameter set.
///
/// Holds the diameter-independent part of the integrand at every node so a
/// profile costs one exponential per node plus one rational term per
/// (node, grid point) pair.
class RcfKernel {
 public:
  explicit RcfKernel(const RcfParams& params);

  const RcfParams& params() const noexcept { return params_; }

  double intensity(double omega, double diameter_nm) const;

  /// Raw intensity at every grid point.
  std::vector<double> profile(std::span<const double> omega_grid, double diameter_nm) const;

  /// Profile scaled so its maximum over the grid is 1.
  std::vector<double> normalized_profile(std::span<const double> omega_grid, double diameter_nm) const;

 private:
  std::vector<double> node_weight(double diameter_nm) const;

  RcfParams params_;
  std::vector<double> xi_;
  std::vector<double> measure_;   // quadrature weight times geometric measure
  std::vector<double> omega_;     // dispersion at each node
  double half_width_sq_;
};

struct ModelSpectrumRequest {
  std::vector<double> omega_grid;
  std::variant<double, DiameterDistribution> diameter;
  RcfParams params;

  /// Message when the grid strays beyond [omega(1), omega(0)] +- 10 gamma0.
  std::optional<std::string> coverage_warning() const;
};

/// Peak-normalized model spectrum. For a distribution, the per-diameter
/// normalized profiles are mixed with the distribution weights and the
/// mixture is normalized again.
Spectrum simulate_spectrum(const ModelSpectrumRequest& req);

/// Mixture of normalized profiles, normalized; shared by simulate_spectrum
/// and the distribution fits.
std::vector<double> mixture_profile(const RcfKernel& kernel, std::span<const double> omega_grid,
                                    std::span<const WeightedDiameter> support);

struct LorentzianFit {
  double center;
  double fwhm;
  double amplitude;
  double offset;
};

/// Least-squares Lorentzian plus constant, seeded from extract_features.
LorentzianFit fit_lorentzian(const Spectrum& s);

/// Sets C so that sqrt(A + B) + C equals the bulk Lorentzian center, and
/// gamma0 to the bulk Lorentzian FWHM.
RcfParams calibrate_C(const Spectrum& bulk_reference, const RcfParams& params_without_C);

}  // namespace nwraman
