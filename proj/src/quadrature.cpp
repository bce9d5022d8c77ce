#include "nwraman/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>

#include "nwraman/errors.hpp"

namespace nwraman {

GaussLegendreRule::GaussLegendreRule(int n) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)),
            &gsl_integration_glfixed_table_free);
  if (!table) throw Error("gauss-legendre: table allocation failed for n=" + std::to_string(n));
  nodes_.resize(static_cast<std::size_t>(n));
  weights_.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    gsl_integration_glfixed_point(0.0, 1.0, i, &nodes_[i], &weights_[i], table.get());
  }
}

std::shared_ptr<const GaussLegendreRule> GaussLegendreRule::on_unit_interval(int n) {
  if (n < 1) throw ValidationError("gauss-legendre: node count must be positive");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot.reset(new GaussLegendreRule(n));
  return slot;
}

}  // namespace nwraman
