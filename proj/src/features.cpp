#include "nwraman/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nwraman/errors.hpp"

namespace nwraman {

PeakFeatures extract_features(const Spectrum& s) {
  const auto x = s.wavenumbers();
  const auto y = s.intensities();
  const std::size_t n = s.size();
  const auto k = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (k == 0 || k + 1 == n) throw NoPeakError("extract_features: maximum at spectrum edge");
  if (!(y[k] > 0.0)) throw NoPeakError("extract_features: maximum is not positive");

  // Vertex of the parabola through (x[k-1], x[k], x[k+1]); valid for uneven spacing.
  const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
  const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  double position = x1;
  double amplitude = y1;
  if (curv < 0.0) {
    // p(x) = y1 + b (x - x1) + curv (x - x1)^2 with b the slope at x1.
    const double b = d01 + curv * (x1 - x0);
    const double dx = std::clamp(-b / (2.0 * curv), x0 - x1, x2 - x1);
    position = x1 + dx;
    amplitude = y1 + b * dx + curv * dx * dx;
  }

  const double half = 0.5 * amplitude;
  std::size_t i = k;
  while (i > 0 && y[i - 1] > half) --i;
  if (i == 0) throw IncompletePeakError("extract_features: no half-maximum crossing below the peak");
  const double left = x[i - 1] + (half - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);

  std::size_t j = k;
  while (j + 1 < n && y[j + 1] > half) ++j;
  if (j + 1 == n) throw IncompletePeakError("extract_features: no half-maximum crossing above the peak");
  const double right = x[j] + (y[j] - half) * (x[j + 1] - x[j]) / (y[j] - y[j + 1]);

  const double left_hw = position - left;
  const double right_hw = right - position;
  if (!(left_hw > 0.0 && right_hw > 0.0)) {
    throw IncompletePeakError("extract_features: degenerate half-width");
  }
  return {position, right - left, left_hw / right_hw, amplitude};
}

PowerSeries::PowerSeries(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) throw ValidationError("power series: at least two points required");
  std::set<double> seen;
  for (const auto& [p, v] : entries_) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("power series: powers must be > 0");
    if (!std::isfinite(v)) throw ValidationError("power series: non-finite value");
    seen.insert(p);
  }
  if (seen.size() == 1) throw RankDeficiencyError("power series: all powers are equal");
  if (seen.size() != entries_.size()) throw ValidationError("power series: repeated power");
}

LineFit fit_feature_vs_power(const PowerSeries& series) {
  const auto& e = series.entries();
  const double n = static_cast<double>(e.size());
  double mp = 0.0, mv = 0.0;
  for (const auto& [p, v] : e) {
    mp += p;
    mv += v;
  }
  mp /= n;
  mv /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [p, v] : e) {
    sxx += (p - mp) * (p - mp);
    sxy += (p - mp) * (v - mv);
  }
  if (!(sxx > 0.0)) throw RankDeficiencyError("fit_feature_vs_power: powers have no spread");
  const double slope = sxy / sxx;
  const double intercept = mv - slope * mp;
  double sse = 0.0;
  for (const auto& [p, v] : e) {
    const double r = v - (intercept + slope * p);
    sse += r * r;
  }
  return {slope, intercept, std::sqrt(sse / n)};
}

}  // namespace nwraman
