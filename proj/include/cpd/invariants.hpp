#pragma once

#include <limits>
#include <span>
#include <vector>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"

namespace cpd {

struct InvariantValues {
  double H = 0.0;
  double H_h = 0.0;
  double M = 0.0;
  double I = 0.0;
};

/// H = |v|^2/2 + U(x).
double energy(const ParticleState& s, const FieldModel& field);

/// H_h = H - (h^2/8) |grad U(x)|^2; conserved exactly by EXS-O2 for quadratic U.
double modified_energy(const ParticleState& s, const FieldModel& field, double h);

/// M = (v + A(x))^T S x.
double momentum(const ParticleState& s, const FieldModel& field, const SkewMatrix3& S);

/// I = |v x B(x)|^2 / (2 |B(x)|^3). Throws DegenerateField when |B(x)| < 1e-12.
double magnetic_moment(const ParticleState& s, const FieldModel& field);

InvariantValues evaluate_invariants(const ParticleState& s, const ProblemSpec& problem, double h);

enum class Channel { H, Hh, M, I };
inline constexpr Channel kChannels[] = {Channel::H, Channel::Hh, Channel::M, Channel::I};

/// Relative errors |Q(x^n, v^n) - Q(x^0, v^0)| / |Q(x^0, v^0)| per channel. A
/// channel whose initial value is below 1e-14 in magnitude reports absolute
/// drift instead and is flagged in `absolute`.
struct DriftSeries {
  std::vector<double> times;
  std::vector<double> e_H;
  std::vector<double> e_Hh;
  std::vector<double> e_M;
  std::vector<double> e_I;
  InvariantValues initial;
  struct {
    bool H = false;
    bool Hh = false;
    bool M = false;
    bool I = false;
  } absolute;

  std::size_t size() const { return times.size(); }
  const std::vector<double>& channel(Channel c) const;
  /// Max over samples with t <= t_max.
  double max_drift(Channel c, double t_max = std::numeric_limits<double>::infinity()) const;
};

/// Drift relative to the first sample. Throws InvalidParameter on an empty input.
DriftSeries drift_series(std::span<const ParticleState> traj, const ProblemSpec& problem, double h);

}  // namespace cpd
