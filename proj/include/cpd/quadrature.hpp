#pragma once

#include <span>
#include <vector>

namespace cpd {

/// Gauss-Legendre rule mapped to [0, 1]. An s-node rule integrates
/// polynomials of degree <= 2s-1 exactly.
class GaussLegendreRule {
 public:
  /// Throws InvalidParameter for nodes < 1 or nodes > kMaxNodes.
  explicit GaussLegendreRule(int nodes);

  static constexpr int kMaxNodes = 256;

  /// Shared, lazily built rule; thread-safe.
  static const GaussLegendreRule& cached(int nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace cpd
