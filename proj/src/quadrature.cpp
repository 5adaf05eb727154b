#include "qlearn/quadrature.hpp"

#include <memory>

#include <gsl/gsl_integration.h>

#include "qlearn/errors.hpp"

namespace qlearn {

GaussLegendre::GaussLegendre(std::size_t order) {
  if (order < 2) throw ConfigError("GaussLegendre: quadrature order must be at least 2");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(order), &gsl_integration_glfixed_table_free);
  if (!table) throw ConfigError("GaussLegendre: failed to build the node table");
  nodes_.resize(order);
  weights_.resize(order);
  for (std::size_t i = 0; i < order; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table.get());
  }
}

void GaussLegendre::map_to(double a, double b, std::vector<double>& x, std::vector<double>& w) const {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  x.resize(nodes_.size());
  w.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    x[i] = mid + half * nodes_[i];
    w[i] = half * weights_[i];
  }
}

}  // namespace qlearn
