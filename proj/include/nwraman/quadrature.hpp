#pragma once

#include <memory>
#include <span>
#include <vector>

namespace nwraman {

/// Gauss–Legendre nodes and weights mapped onto [0, 1].
class GaussLegendreRule {
 public:
  /// Shared, immutable rule for `n` nodes. Rules are built once per n and
  /// cached for the life of the process; safe to call from any thread.
  static std::shared_ptr<const GaussLegendreRule> on_unit_interval(int n);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  int size() const noexcept { return static_cast<int>(nodes_.size()); }

 private:
  explicit GaussLegendreRule(int n);

  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace nwraman
