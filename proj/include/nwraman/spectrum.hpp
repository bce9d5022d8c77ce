#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nwraman {

/// Smallest sample count accepted for a spectrum or a cropped window.
inline constexpr std::size_t kMinSamples = 8;

/// Intensity sampled on a strictly increasing Raman-shift axis (cm^-1).
///
/// Immutable once constructed; construction enforces equal lengths, at
/// least kMinSamples points, finite values and a strictly increasing axis.
class Spectrum {
 public:
  Spectrum(std::vector<double> wavenumbers, std::vector<double> intensities);

  /// Same as the constructor but sorts rows by wavenumber first.
  /// Duplicate wavenumbers still raise ValidationError.
  static Spectrum from_unsorted(std::vector<double> wavenumbers, std::vector<double> intensities);

  std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }
  std::span<const double> intensities() const noexcept { return intensities_; }
  std::size_t size() const noexcept { return wavenumbers_.size(); }

  double front_wavenumber() const noexcept { return wavenumbers_.front(); }
  double back_wavenumber() const noexcept { return wavenumbers_.back(); }

  /// Copy with the same axis and new intensities.
  Spectrum with_intensities(std::vector<double> intensities) const;

  /// Reflect the axis (w -> -w) and reorder so it stays increasing. Used to
  /// bring an anti-Stokes band recorded at negative shift onto positive shift.
  Spectrum mirrored() const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  std::vector<double> wavenumbers_;
  std::vector<double> intensities_;
};

/// Acquisition conditions attached to a recorded spectrum.
struct MeasurementMeta {
  double wavelength_nm = 514.523;
  double source_power_uW = 500.0;
  double filter_od = 0.0;
  std::optional<double> catalyst_size_nm;
  std::string label;

  /// Throws ValidationError when a field is out of range.
  void validate() const;

  /// Power reaching the sample after the neutral-density filter.
  double delivered_power_uW() const;

  friend bool operator==(const MeasurementMeta&, const MeasurementMeta&) = default;
};

// ---- two-column text I/O ----

/// Parse "wavenumber intensity" rows separated by whitespace or a comma.
/// Blank lines and lines whose first non-blank character is '#' are skipped.
Spectrum parse_spectrum(std::istream& in);
Spectrum load_spectrum(const std::filesystem::path& path);

/// Writes every value with round-trip precision. Each entry of
/// `header_comments` becomes a leading "# ..." line.
void write_spectrum(std::ostream& out, const Spectrum& s,
                    std::span<const std::string> header_comments = {});
void save_spectrum(const std::filesystem::path& path, const Spectrum& s,
                   std::span<const std::string> header_comments = {});

// ---- preprocessing ----

/// Removes the straight line whose residuals have zero median over the first
/// and over the last ceil(edge_fraction * N) samples. Negative output is kept.
Spectrum subtract_baseline(const Spectrum& s, double edge_fraction);

/// Samples with lo <= wavenumber <= hi.
Spectrum crop_window(const Spectrum& s, double lo, double hi);

/// Scales intensities so that the maximum is exactly 1.
Spectrum normalize_peak(const Spectrum& s);

/// Trapezoidal integral of intensity over wavenumber.
double integrated_area(const Spectrum& s);

}  // namespace nwraman
