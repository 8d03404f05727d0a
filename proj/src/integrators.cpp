#include "cpd/integrators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "cpd/quadrature.hpp"

namespace cpd {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr int kStagnationWindow = 3;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::ImsO2:
      return "ims-o2";
    case Method::ExsO2:
      return "exs-o2";
    case Method::Boris:
      return "boris";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  const std::string n = lower(name);
  if (n == "ims-o2" || n == "ims") return Method::ImsO2;
  if (n == "exs-o2" || n == "exs") return Method::ExsO2;
  if (n == "boris") return Method::Boris;
  throw NotFound("unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() { return {Method::ImsO2, Method::ExsO2, Method::Boris}; }

void IntegratorConfig::validate() const {
  if (!std::isfinite(h) || h <= 0.0) throw InvalidParameter("step size h must be positive");
  if (quad_nodes < 0) throw InvalidParameter("quad_nodes must be >= 1 (or 0 for automatic)");
  if (!(fp_tol > 0.0)) throw InvalidParameter("fp_tol must be positive");
  if (fp_max_iter < 1) throw InvalidParameter("fp_max_iter must be >= 1");
}

int effective_quad_nodes(const IntegratorConfig& cfg, const FieldModel& field) {
  if (cfg.quad_nodes > 0) return cfg.quad_nodes;
  return field.is_quadratic_U() ? 2 : 10;
}

Vec3 rotate_by_field(const Vec3& b, const Vec3& v, double t) {
  // e^{tB~} = I + (sin th / th) tB~ + ((1 - cos th) / th^2) t^2 B~^2, th = t|b|.
  const double theta = t * norm(b);
  const Vec3 bv = cross(v, b);
  const Vec3 bbv = cross(bv, b);
  double sinc = 0.0;
  double cosc = 0.0;
  if (std::fabs(theta) < kSmallAngle) {
    const double th2 = theta * theta;
    sinc = 1.0 - th2 / 6.0;
    cosc = 0.5 - th2 / 24.0;
  } else {
    sinc = std::sin(theta) / theta;
    const double s = std::sin(0.5 * theta) / theta;
    cosc = 2.0 * s * s;
  }
  return v + (sinc * t) * bv + (cosc * t * t) * bbv;
}

Vec3 rotation_flow(const Vec3& x, const Vec3& v, double t, const FieldModel& field) {
  return rotate_by_field(field.B(x), v, t);
}

Vec3 avf_field_average(const Vec3& x_a, const Vec3& x_b, const FieldModel& field, int nodes) {
  const auto& rule = GaussLegendreRule::cached(nodes);
  const auto rho = rule.nodes();
  const auto w = rule.weights();
  Vec3 acc{};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    acc += w[i] * field.E(rho[i] * x_a + (1.0 - rho[i]) * x_b);
  }
  return acc;
}

StepReport step_exs(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field) {
  const double h = cfg.h;
  const double half = 0.5 * h;
  const Vec3 e0 = field.E(s.x);
  const Vec3 w = rotation_flow(s.x, s.v, half, field);
  const Vec3 x1 = s.x + h * w + (half * h) * e0;
  const Vec3 e1 = field.E(x1);
  const Vec3 v1 = rotation_flow(x1, w + half * (e0 + e1), half, field);
  return StepReport{ParticleState{x1, v1, s.t + h}, 0, true, 0.0};
}

StepReport step_ims(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field) {
  const double h = cfg.h;
  const double half = 0.5 * h;
  const int nodes = effective_quad_nodes(cfg, field);

  const Vec3 w = rotation_flow(s.x, s.v, half, field);
  const Vec3 base = s.x + h * w;
  Vec3 xk = base + (half * h) * field.E(s.x);

  Vec3 avg{};
  double inc = std::numeric_limits<double>::infinity();
  double prev_inc = inc;
  int non_decreasing = 0;
  int iter = 0;
  bool converged = false;
  while (iter < cfg.fp_max_iter) {
    ++iter;
    avg = avf_field_average(s.x, xk, field, nodes);
    const Vec3 next = base + (half * h) * avg;
    inc = max_abs(next - xk);
    xk = next;
    if (inc <= cfg.fp_tol) {
      converged = true;
      break;
    }
    non_decreasing = inc >= prev_inc ? non_decreasing + 1 : 0;
    if (non_decreasing >= kStagnationWindow) {
      converged = true;
      break;
    }
    prev_inc = inc;
  }
  if (!converged) {
    throw Diverged("IMS-O2 fixed-point iteration did not converge in " + std::to_string(iter) +
                       " iterations (last increment " + std::to_string(inc) + ")",
                   ParticleState{xk, s.v, s.t + h}, iter);
  }

  const Vec3 v1 = rotation_flow(xk, w + h * avg, half, field);
  return StepReport{ParticleState{xk, v1, s.t + h}, iter, true, inc};
}

StepReport step_boris(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field) {
  // Synchronized form: with v^n = (x^{n+1} - x^{n-1}) / 2h the scheme is
  //   v^{n+1/2} = v^n + h/2 (E(x^n) + v^n x B(x^n))
  //   x^{n+1}   = x^n + h v^{n+1/2}
  //   v^{n+1}   = v^{n+1/2} + h/2 (E(x^{n+1}) + v^{n+1} x B(x^{n+1}))
  // and the last, linear, equation is solved by the Boris rotation.
  const double h = cfg.h;
  const double half = 0.5 * h;
  const Vec3 v_half = s.v + half * (field.E(s.x) + cross(s.v, field.B(s.x)));
  const Vec3 x1 = s.x + h * v_half;
  const Vec3 r = v_half + half * field.E(x1);
  const Vec3 tau = half * field.B(x1);
  const Vec3 v1 = (r + cross(r, tau) + dot(r, tau) * tau) / (1.0 + norm_sq(tau));
  return StepReport{ParticleState{x1, v1, s.t + h}, 0, true, 0.0};
}

StepReport step(const ParticleState& s, const IntegratorConfig& cfg, const FieldModel& field) {
  switch (cfg.method) {
    case Method::ImsO2:
      return step_ims(s, cfg, field);
    case Method::ExsO2:
      return step_exs(s, cfg, field);
    case Method::Boris:
      return step_boris(s, cfg, field);
  }
  throw InvalidParameter("unknown method");
}

std::string_view status_name(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::Ok:
      return "ok";
    case IntegrationStatus::Diverged:
      return "diverged";
    case IntegrationStatus::NumericalBlowup:
      return "numerical_blowup";
    case IntegrationStatus::DomainError:
      return "domain_error";
  }
  return "unknown";
}

std::int64_t step_count(double t_end, double h) {
  if (!(h > 0.0)) throw InvalidParameter("step size h must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidParameter("t_end must be finite and >= 0");
  return std::llround(t_end / h);
}

Trajectory integrate(const ProblemSpec& problem, const IntegratorConfig& cfg, double t_end, std::int64_t stride,
                     const std::function<void(const ParticleState&)>& on_sample) {
  cfg.validate();
  if (stride < 1) throw InvalidParameter("sample stride must be >= 1");

  Trajectory traj;
  traj.stride = stride;
  traj.steps_requested = step_count(t_end, cfg.h);
  traj.realized_t_end = static_cast<double>(traj.steps_requested) * cfg.h;
  traj.samples.reserve(static_cast<std::size_t>(traj.steps_requested / stride + 1));

  auto keep = [&](const ParticleState& st) {
    traj.samples.push_back(st);
    if (on_sample) on_sample(st);
  };

  ParticleState state{problem.x0, problem.v0, 0.0};
  keep(state);
  for (std::int64_t n = 1; n <= traj.steps_requested; ++n) {
    try {
      StepReport rep = step(state, cfg, problem.field);
      state = rep.state;
      traj.fp.total_iterations += rep.fp_iterations;
      traj.fp.max_iterations = std::max(traj.fp.max_iterations, rep.fp_iterations);
      if (rep.fp_iterations > 0 && rep.fp_increment > cfg.fp_tol) ++traj.fp.stagnated_steps;
    } catch (const Diverged& e) {
      traj.status = IntegrationStatus::Diverged;
      traj.message = "step " + std::to_string(n) + ": " + e.what();
      return traj;
    } catch (const DomainError& e) {
      traj.status = IntegrationStatus::DomainError;
      traj.message = "step " + std::to_string(n) + ": " + e.what();
      return traj;
    }
    // Time from the step index avoids accumulating h.
    state.t = static_cast<double>(n) * cfg.h;
    if (!is_finite(state.x) || !is_finite(state.v)) {
      traj.status = IntegrationStatus::NumericalBlowup;
      traj.message = "non-finite state at step " + std::to_string(n);
      return traj;
    }
    traj.steps_taken = n;
    if (n % stride == 0) keep(state);
  }
  return traj;
}

}  // namespace cpd
