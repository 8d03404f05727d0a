#pragma once

// One-step methods for x'' = v x B(x) + E(x).
//
// Both splitting methods are the Strang composition
//   Phi_h = Phi^L_{h/2} o Phi^P_h o Phi^L_{h/2}
// of the exact magnetic rotation Phi^L (x frozen, v rotated about B(x)) with a
// position-velocity propagator Phi^P:
//   IMS-O2: Phi^P is the average-vector-field (AVF) map, implicit in x;
//   EXS-O2: Phi^P is its linearization, i.e. velocity Verlet.
// The Boris baseline is the synchronized-velocity form of the classical
// Boris push.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/errors.hpp"
#include "cpd/fields.hpp"
#include "cpd/linalg.hpp"

namespace cpd {

struct ParticleState {
  Vec3 x;
  Vec3 v;
  double t = 0.0;
};

enum class Method { ImsO2, ExsO2, Boris };

std::string_view method_name(Method m);
/// Accepts "ims-o2", "exs-o2", "boris" (case-insensitive). Throws NotFound.
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

struct IntegratorConfig {
  Method method = Method::ExsO2;
  double h = 0.01;
  /// Gauss-Legendre nodes for the AVF integral; 0 picks 2 for quadratic U and 10 otherwise.
  int quad_nodes = 0;
  /// Absolute max-norm threshold on the fixed-point increment.
  double fp_tol = 1e-16;
  int fp_max_iter = 50;

  /// Throws InvalidParameter.
  void validate() const;
};

int effective_quad_nodes(const IntegratorConfig& cfg, const FieldModel& field);

struct StepReport {
  ParticleState state;
  int fp_iterations = 0;
  bool converged = true;
  /// Last fixed-point increment (max norm); 0 for explicit methods.
  double fp_increment = 0.0;
};

/// The fixed-point iteration hit fp_max_iter while the increment was still
/// decreasing.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, ParticleState last_iterate, int iterations)
      : Error(what), last_(last_iterate), iterations_(iterations) {}

  const ParticleState& last_iterate() const { return last_; }
  int iterations() const { return iterations_; }

 private:
  ParticleState last_;
  int iterations_;
};

class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

/// e^{t B~} v for the matrix B~ of `b` (B~ v = v x b), in closed form.
Vec3 rotate_by_field(const Vec3& b, const Vec3& v, double t);

/// Exact magnetic subflow: e^{t B~(x)} v.
Vec3 rotation_flow(const Vec3& x, const Vec3& v, double t, const FieldModel& field);

/// Gauss-Legendre approximation of int_0^1 E(rho x_a + (1 - rho) x_b) d rho.
Vec3 avf_field_average(const Vec3& x_a, const Vec3& x_b, const FieldModel& field, int nodes);

StepReport step_exs(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field);

/// Throws Diverged when the fixed-point iteration fails.
StepReport step_ims(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field);

StepReport step_boris(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field);

/// Dispatches on cfg.method.
StepReport step(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field);

struct FixedPointStats {
  std::int64_t total_iterations = 0;
  int max_iterations = 0;
  std::int64_t stagnated_steps = 0;
};

enum class IntegrationStatus { Ok, Diverged, NumericalBlowup, DomainError };

std::string_view status_name(IntegrationStatus s);

struct Trajectory {
  std::vector<ParticleState> samples;
  std::int64_t steps_requested = 0;
  std::int64_t steps_taken = 0;
  double realized_t_end = 0.0;
  std::int64_t stride = 1;
  FixedPointStats fp;
  IntegrationStatus status = IntegrationStatus::Ok;
  std::string message;

  bool ok() const { return status == IntegrationStatus::Ok; }
};

/// Number of steps for a horizon: round(t_end / h).
std::int64_t step_count(double t_end, double h);

/// Integrates from (x0, v0) for round(t_end/h) steps, keeping every
/// `stride`-th state (the initial state always). `on_sample`, when set, sees
/// each kept state as it is produced. Failures stop the run and are reported
/// in the returned trajectory rather than thrown.
Trajectory integrate(const ProblemSpec& problem, const IntegratorConfig& cfg, double t_end,
                     std::int64_t stride = 1,
                     const std::function<void(const ParticleState&)>& on_sample = {});

}  // namespace cpd
