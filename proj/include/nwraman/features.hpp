#pragma once

#include <utility>
#include <vector>

#include "nwraman/spectrum.hpp"

namespace nwraman {

/// Single-peak readout of a baseline-corrected spectrum.
struct PeakFeatures {
  double position;   // cm^-1
  double fwhm;       // cm^-1
  double asymmetry;  // left half-width / right half-width
  double amplitude;

  friend bool operator==(const PeakFeatures&, const PeakFeatures&) = default;
};

/// Position and amplitude from the vertex of the parabola through the
/// discrete maximum and its two neighbours; half-maximum crossings from
/// linear interpolation walking outward from the maximum.
PeakFeatures extract_features(const Spectrum& s);

/// (delivered power in uW, feature value) pairs with at least two distinct,
/// strictly positive powers.
class PowerSeries {
 public:
  using Entry = std::pair<double, double>;

  /// ValidationError for fewer than two entries, nonpositive or repeated
  /// powers; RankDeficiencyError when every power is identical.
  explicit PowerSeries(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
};

struct LineFit {
  double slope;
  double intercept;
  double residual_rms;

  friend bool operator==(const LineFit&, const LineFit&) = default;
};

/// Ordinary least-squares straight line value = slope * power + intercept.
/// The intercept is the zero-power (heating-free) estimate.
LineFit fit_feature_vs_power(const PowerSeries& series);

}  // namespace nwraman
