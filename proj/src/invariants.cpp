#include "cpd/invariants.hpp"

#include <algorithm>
#include <cmath>

namespace cpd {

namespace {

constexpr double kDegenerateB = 1e-12;
constexpr double kRelativeFloor = 1e-14;

double drift(double value, double initial, bool absolute) {
  const double d = std::fabs(value - initial);
  return absolute ? d : d / std::fabs(initial);
}

}  // namespace

double energy(const ParticleState& s, const FieldModel& field) { return 0.5 * norm_sq(s.v) + field.U(s.x); }

double modified_energy(const ParticleState& s, const FieldModel& field, double h) {
  return energy(s, field) - (h * h / 8.0) * norm_sq(field.grad_U(s.x));
}

double momentum(const ParticleState& s, const FieldModel& field, const SkewMatrix3& S) {
  return dot(s.v + field.A(s.x), S * s.x);
}

double magnetic_moment(const ParticleState& s, const FieldModel& field) {
  const Vec3 b = field.B(s.x);
  const double bn = norm(b);
  if (bn < kDegenerateB) throw DegenerateField("magnetic moment undefined where |B| vanishes");
  return norm_sq(cross(s.v, b)) / (2.0 * bn * bn * bn);
}

InvariantValues evaluate_invariants(const ParticleState& s, const ProblemSpec& problem, double h) {
  return {energy(s, problem.field), modified_energy(s, problem.field, h), momentum(s, problem.field, problem.S),
          magnetic_moment(s, problem.field)};
}

const std::vector<double>& DriftSeries::channel(Channel c) const {
  switch (c) {
    case Channel::H:
      return e_H;
    case Channel::Hh:
      return e_Hh;
    case Channel::M:
      return e_M;
    case Channel::I:
      return e_I;
  }
  return e_H;
}

double DriftSeries::max_drift(Channel c, double t_max) const {
  const auto& values = channel(c);
  double out = 0.0;
  for (std::size_t i = 0; i < values.size() && times[i] <= t_max; ++i) out = std::max(out, values[i]);
  return out;
}

DriftSeries drift_series(std::span<const ParticleState> traj, const ProblemSpec& problem, double h) {
  if (traj.empty()) throw InvalidParameter("drift series needs at least one state");
  DriftSeries out;
  out.initial = evaluate_invariants(traj.front(), problem, h);
  const InvariantValues& q0 = out.initial;
  out.absolute.H = std::fabs(q0.H) < kRelativeFloor;
  out.absolute.Hh = std::fabs(q0.H_h) < kRelativeFloor;
  out.absolute.M = std::fabs(q0.M) < kRelativeFloor;
  out.absolute.I = std::fabs(q0.I) < kRelativeFloor;

  out.times.reserve(traj.size());
  out.e_H.reserve(traj.size());
  out.e_Hh.reserve(traj.size());
  out.e_M.reserve(traj.size());
  out.e_I.reserve(traj.size());
  for (const ParticleState& s : traj) {
    const InvariantValues q = evaluate_invariants(s, problem, h);
    out.times.push_back(s.t);
    out.e_H.push_back(drift(q.H, q0.H, out.absolute.H));
    out.e_Hh.push_back(drift(q.H_h, q0.H_h, out.absolute.Hh));
    out.e_M.push_back(drift(q.M, q0.M, out.absolute.M));
    out.e_I.push_back(drift(q.I, q0.I, out.absolute.I));
  }
  return out;
}

}  // namespace cpd
