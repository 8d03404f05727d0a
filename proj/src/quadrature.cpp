#include "cpd/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "cpd/errors.hpp"

namespace cpd {

GaussLegendreRule::GaussLegendreRule(int n) {
  if (n < 1 || n > kMaxNodes) {
    throw InvalidParameter("Gauss-Legendre node count must be in [1, " + std::to_string(kMaxNodes) +
                           "], got " + std::to_string(n));
  }
  nodes_.resize(n);
  weights_.resize(n);

  // Newton iteration on P_n over [-1, 1] from the Chebyshev-like initial guess,
  // then map to [0, 1]. Roots are symmetric, so only half are computed.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      // p0 = P_n(z), p1 = P_{n-1}(z)
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) <= 1e-16) break;
    }
    // Re-evaluate the derivative at the converged root for the weight.
    {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // z is the i-th largest root; store ascending on [0, 1].
    nodes_[n - 1 - i] = 0.5 * (1.0 + z);
    nodes_[i] = 0.5 * (1.0 - z);
    weights_[n - 1 - i] = 0.5 * w;
    weights_[i] = 0.5 * w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.5;
}

const GaussLegendreRule& GaussLegendreRule::cached(int nodes) {
  static std::array<std::once_flag, kMaxNodes + 1> flags;
  static std::array<std::unique_ptr<GaussLegendreRule>, kMaxNodes + 1> rules;
  if (nodes < 1 || nodes > kMaxNodes) {
    throw InvalidParameter("Gauss-Legendre node count out of range: " + std::to_string(nodes));
  }
  std::call_once(flags[nodes], [nodes] { rules[nodes] = std::make_unique<GaussLegendreRule>(nodes); });
  return *rules[nodes];
}

}  // namespace cpd
