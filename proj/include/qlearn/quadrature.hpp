#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace qlearn {

/// Gauss-Legendre rule of fixed order on [-1, 1]. Immutable once built.
class GaussLegendre {
 public:
  /// Throws ConfigError for order < 2.
  explicit GaussLegendre(std::size_t order);

  [[nodiscard]] std::size_t order() const { return nodes_.size(); }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

  /// Nodes mapped onto [a, b] and correspondingly scaled weights.
  void map_to(double a, double b, std::vector<double>& x, std::vector<double>& w) const;

  /// Integral of f over [a, b], split into `panels` equal subintervals.
  template <class F>
  auto integrate(F&& f, double a, double b, std::size_t panels = 1) const {
    using R = decltype(f(a));
    R acc{};
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = a + width * static_cast<double>(p);
      const double half = 0.5 * width;
      const double mid = lo + half;
      R part{};
      for (std::size_t i = 0; i < nodes_.size(); ++i) part += weights_[i] * f(mid + half * nodes_[i]);
      acc += half * part;
    }
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Panel count that keeps an oscillation of angular frequency omega over a span of
/// length `span` below `radians_per_panel` per panel.
inline std::size_t oscillation_panels(double omega, double span, double radians_per_panel = 32.0) {
  const double phase = std::abs(omega) * std::abs(span);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(phase / radians_per_panel)));
}

}  // namespace qlearn
