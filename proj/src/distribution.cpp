#include "nwraman/distribution.hpp"

#include <cmath>
#include <cstdio>

#include "nwraman/errors.hpp"

namespace nwraman {

namespace {

void require_diameter(double d, const char* what) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw ValidationError(std::string("distribution: ") + what + " must be a positive diameter");
  }
}

}  // namespace

DiameterDistribution DiameterDistribution::point(double diameter_nm) {
  require_diameter(diameter_nm, "point_nm");
  DiameterDistribution d;
  d.kind_ = Kind::point;
  d.point_nm_ = diameter_nm;
  return d;
}

DiameterDistribution DiameterDistribution::uniform_interval(double d_min_nm, double d_max_nm) {
  require_diameter(d_min_nm, "interval lower bound");
  require_diameter(d_max_nm, "interval upper bound");
  if (!(d_min_nm < d_max_nm)) throw ValidationError("distribution: interval needs D_min < D_max");
  DiameterDistribution d;
  d.kind_ = Kind::uniform_interval;
  d.d_min_nm_ = d_min_nm;
  d.d_max_nm_ = d_max_nm;
  return d;
}

DiameterDistribution DiameterDistribution::grid(std::vector<double> grid_nm, std::vector<double> weights) {
  if (grid_nm.empty()) throw ValidationError("distribution: empty diameter grid");
  if (grid_nm.size() != weights.size()) {
    throw ValidationError("distribution: grid and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < grid_nm.size(); ++i) {
    require_diameter(grid_nm[i], "grid entry");
    if (!(weights[i] >= 0.0)) throw ValidationError("distribution: negative weight");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("distribution: weights sum to " + std::to_string(total) + ", not 1");
  }
  DiameterDistribution d;
  d.kind_ = Kind::grid;
  d.grid_nm_ = std::move(grid_nm);
  d.weights_ = std::move(weights);
  return d;
}

double DiameterDistribution::point_nm() const {
  if (kind_ != Kind::point) throw ValidationError("distribution: not a point distribution");
  return point_nm_;
}

std::pair<double, double> DiameterDistribution::interval_nm() const {
  if (kind_ != Kind::uniform_interval) throw ValidationError("distribution: not an interval");
  return {d_min_nm_, d_max_nm_};
}

std::vector<WeightedDiameter> DiameterDistribution::support() const {
  switch (kind_) {
    case Kind::point:
      return {{point_nm_, 1.0}};
    case Kind::uniform_interval: {
      std::vector<WeightedDiameter> out;
      out.reserve(kIntervalSamples);
      const double step = (d_max_nm_ - d_min_nm_) / (kIntervalSamples - 1);
      for (int i = 0; i < kIntervalSamples; ++i) {
        const double d = i + 1 == kIntervalSamples ? d_max_nm_ : d_min_nm_ + i * step;
        out.push_back({d, 1.0 / kIntervalSamples});
      }
      return out;
    }
    case Kind::grid: {
      std::vector<WeightedDiameter> out;
      for (std::size_t i = 0; i < grid_nm_.size(); ++i) {
        if (weights_[i] > 0.0) out.push_back({grid_nm_[i], weights_[i]});
      }
      return out;
    }
  }
  return {};
}

std::string DiameterDistribution::summary() const {
  char buf[96];
  switch (kind_) {
    case Kind::point:
      std::snprintf(buf, sizeof buf, "%.2f nm", point_nm_);
      break;
    case Kind::uniform_interval:
      std::snprintf(buf, sizeof buf, "%.1f~%.1f nm", d_min_nm_, d_max_nm_);
      break;
    case Kind::grid: {
      double mean = 0.0;
      for (std::size_t i = 0; i < grid_nm_.size(); ++i) mean += grid_nm_[i] * weights_[i];
      std::snprintf(buf, sizeof buf, "grid(n=%zu) mean %.2f nm", grid_nm_.size(), mean);
      break;
    }
  }
  return buf;
}

const char* to_string(DiameterDistribution::Kind kind) {
  switch (kind) {
    case DiameterDistribution::Kind::point: return "point";
    case DiameterDistribution::Kind::uniform_interval: return "uniform_interval";
    case DiameterDistribution::Kind::grid: return "grid";
  }
  return "?";
}

}  // namespace nwraman
