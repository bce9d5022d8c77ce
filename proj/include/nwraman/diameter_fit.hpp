#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "nwraman/distribution.hpp"
#include "nwraman/rcf_model.hpp"
#include "nwraman/spectrum.hpp"

namespace nwraman {

/// Admissible diameter search range in nm, min_nm < max_nm.
struct DiameterRange {
  double min_nm;
  double max_nm;

  void validate() const;
};

/// Normalized model profiles keyed by (params, grid, diameter rounded to
/// 1e-4 nm). Profiles are always computed at the rounded diameter so a hit
/// and a miss return identical values. Safe for concurrent use.
class ModelCache {
 public:
  static constexpr double kResolutionNm = 1e-4;

  static double quantize(double diameter_nm);

  std::shared_ptr<const std::vector<double>> profile(const RcfKernel& kernel,
                                                     std::span<const double> omega_grid,
                                                     double diameter_nm);
  std::size_t size() const;
  std::size_t misses() const;

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::int64_t>;
  mutable std::mutex mu_;
  std::map<Key, std::shared_ptr<const std::vector<double>>> entries_;
  std::size_t misses_ = 0;
};

struct FitOptions {
  /// Share between fits on the same grid and parameters to reuse profiles.
  std::shared_ptr<ModelCache> cache;
  int coarse_points = 16;
  /// Lattice points per axis for the interval coarse scan.
  int interval_coarse_points = 12;
};

/// Candidate evaluated during the coarse scan and its SSE.
struct ScanPoint {
  DiameterDistribution candidate;
  double sse;
};

struct FitReport {
  DiameterDistribution distribution;
  double scale;
  double offset;
  double sse;
  /// Objective evaluations (candidate model spectra compared to the data).
  int n_model_evals;
  Geometry geometry;
  std::vector<std::string> warnings;
  std::vector<ScanPoint> coarse_scan;
  /// Grid fits only: KKT residual and residual norm after each NNLS update.
  double kkt_residual = 0.0;
  std::vector<double> nnls_residual_history;
};

/// Point diameter minimizing sum (y - scale*model(D) - offset)^2, with the
/// two linear nuisance parameters solved in closed form per candidate.
FitReport fit_single_diameter(const Spectrum& measured, const RcfParams& params, DiameterRange range,
                              const FitOptions& options = {});

/// Uniform interval [D_min, D_max] (21-point inner average) minimizing the
/// same objective. Collapses to a point fit when the optimum has zero width.
FitReport fit_interval_distribution(const Spectrum& measured, const RcfParams& params,
                                    DiameterRange range, const FitOptions& options = {});

/// Nonnegative weights on a fixed diameter grid (5..50 entries) plus a free
/// offset. The overall scale is reported separately from the normalized weights.
FitReport fit_grid_distribution(const Spectrum& measured, const RcfParams& params,
                                std::span<const double> grid_nm, const FitOptions& options = {});

}  // namespace nwraman
