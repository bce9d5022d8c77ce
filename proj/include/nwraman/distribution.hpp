#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nwraman {

/// One support point of a diameter distribution.
struct WeightedDiameter {
  double diameter_nm;
  double weight;
};

/// Nanowire diameter population: a single value, a uniform interval, or
/// weights on an explicit diameter grid.
class DiameterDistribution {
 public:
  enum class Kind { point, uniform_interval, grid };

  /// Number of equally weighted diameters used to sample a uniform interval.
  static constexpr int kIntervalSamples = 21;

  static DiameterDistribution point(double diameter_nm);
  static DiameterDistribution uniform_interval(double d_min_nm, double d_max_nm);
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  static DiameterDistribution grid(std::vector<double> grid_nm, std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  double point_nm() const;
  std::pair<double, double> interval_nm() const;
  const std::vector<double>& grid_nm() const noexcept { return grid_nm_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Discrete support used by the forward model. Zero-weight grid entries
  /// are dropped.
  std::vector<WeightedDiameter> support() const;

  /// "8.00 nm", "7.0~9.0 nm", or "grid(n=...) mean 8.00 nm".
  std::string summary() const;

  friend bool operator==(const DiameterDistribution&, const DiameterDistribution&) = default;

 private:
  DiameterDistribution() = default;

  Kind kind_ = Kind::point;
  double point_nm_ = 0.0;
  double d_min_nm_ = 0.0;
  double d_max_nm_ = 0.0;
  std::vector<double> grid_nm_;
  std::vector<double> weights_;
};

const char* to_string(DiameterDistribution::Kind kind);

}  // namespace nwraman
