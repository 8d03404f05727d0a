#pragma once

// High-accuracy reference solutions: adaptive Dormand-Prince 5(4) on the
// first-order system (x, v)' = (v, v x B(x) + E(x)).

#include <cstdint>
#include <string_view>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"

namespace cpd {

struct ReferenceConfig {
  double rtol = 1e-12;
  double atol = 1e-12;
  std::int64_t max_steps = 10'000'000;

  /// Throws InvalidParameter when a tolerance is below 1e-14 or max_steps < 1.
  void validate() const;
};

struct ReferenceStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
};

/// Advances `start` by `duration` (which may be negative).
/// Throws MaxStepsExceeded or StiffnessSuspected.
ParticleState reference_propagate(const FieldModel& field, const ParticleState& start, double duration,
                                  const ReferenceConfig& cfg = {}, ReferenceStats* stats = nullptr);

/// State of the exact flow from (x0, v0) at t_end >= 0.
ParticleState reference_solve(const ProblemSpec& problem, double t_end, const ReferenceConfig& cfg = {});

/// |x - x_ref| / |x_ref| + |v - v_ref| / |v_ref|.
double relative_state_error(const ParticleState& numerical, const ParticleState& reference);

/// Global error at t = round(t_end/h) h of `method` ("ims-o2", "exs-o2",
/// "boris", or "reference") against the reference solution.
double global_error(const ProblemSpec& problem, std::string_view method, double h, double t_end,
                    const ReferenceConfig& ref = {}, const IntegratorConfig& base = {});

}  // namespace cpd
