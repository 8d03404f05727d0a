#include "cpd/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

namespace cpd {

namespace {

using State6 = std::array<double, 6>;

State6 pack(const Vec3& x, const Vec3& v) { return {x.x, x.y, x.z, v.x, v.y, v.z}; }
Vec3 position(const State6& y) { return {y[0], y[1], y[2]}; }
Vec3 velocity(const State6& y) { return {y[3], y[4], y[5]}; }

State6 rhs(const FieldModel& field, const State6& y) {
  const Vec3 x = position(y);
  const Vec3 v = velocity(y);
  return pack(v, cross(v, field.B(x)) + field.E(x));
}

State6 axpy(const State6& y, double h, std::initializer_list<std::pair<double, const State6*>> terms) {
  State6 out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < 6; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

// Dormand-Prince 5(4) tableau (the system is autonomous, so the c_i are not needed).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Error coefficients b - b_hat.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kBeta = 0.04;
constexpr double kAlpha = 0.2 - 0.75 * kBeta;

double error_norm(const State6& y0, const State6& y1, const State6& err, const ReferenceConfig& cfg) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / 6.0);
}

double initial_step(const FieldModel& field, const State6& y0, const State6& f0, double span,
                    const ReferenceConfig& cfg) {
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::fabs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / 6.0);
  d1 = std::sqrt(d1 / 6.0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);

  const State6 y1 = axpy(y0, h0, {{1.0, &f0}});
  const State6 f1 = rhs(field, y1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::fabs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / 6.0) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

void ReferenceConfig::validate() const {
  if (!(rtol >= 1e-14) || !(atol >= 1e-14)) throw InvalidParameter("reference tolerances must be >= 1e-14");
  if (max_steps < 1) throw InvalidParameter("reference max_steps must be >= 1");
}

ParticleState reference_propagate(const FieldModel& field, const ParticleState& start, double duration,
                                  const ReferenceConfig& cfg, ReferenceStats* stats) {
  cfg.validate();
  if (!std::isfinite(duration)) throw InvalidParameter("reference duration must be finite");
  ReferenceStats local;
  ReferenceStats& st = stats ? *stats : local;
  st = {};
  if (duration == 0.0) return start;

  const double dir = duration > 0.0 ? 1.0 : -1.0;
  const double span = std::fabs(duration);
  State6 y = pack(start.x, start.v);
  State6 k1 = rhs(field, y);
  double h = initial_step(field, y, k1, span, cfg);
  double elapsed = 0.0;
  double err_prev = 1e-4;

  while (elapsed < span) {
    if (st.accepted + st.rejected >= cfg.max_steps) {
      throw MaxStepsExceeded("reference solver exceeded " + std::to_string(cfg.max_steps) + " steps");
    }
    bool last = false;
    if (elapsed + h >= span) {
      h = span - elapsed;
      last = true;
    }
    if (h < 1e-14 * std::max(1.0, span)) {
      throw StiffnessSuspected("reference step size underflow at t = " + std::to_string(elapsed));
    }
    const double sh = dir * h;
    const State6 k2 = rhs(field, axpy(y, sh, {{a21, &k1}}));
    const State6 k3 = rhs(field, axpy(y, sh, {{a31, &k1}, {a32, &k2}}));
    const State6 k4 = rhs(field, axpy(y, sh, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State6 k5 = rhs(field, axpy(y, sh, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State6 k6 = rhs(field, axpy(y, sh, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State6 y1 = axpy(y, sh, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State6 k7 = rhs(field, y1);
    const State6 err = axpy(State6{}, sh, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

    const double en = error_norm(y, y1, err, cfg);
    if (en <= 1.0) {
      ++st.accepted;
      elapsed = last ? span : elapsed + h;
      y = y1;
      k1 = k7;  // FSAL
      const double e = std::max(en, 1e-10);
      double fac = std::pow(e, kAlpha) / std::pow(err_prev, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
      err_prev = e;
      h /= fac;
    } else {
      ++st.rejected;
      const double fac = std::clamp(std::pow(en, kAlpha) / kSafety, 1.0, 1.0 / kMinFactor);
      h /= fac;
    }
  }
  return ParticleState{position(y), velocity(y), start.t + duration};
}

ParticleState reference_solve(const ProblemSpec& problem, double t_end, const ReferenceConfig& cfg) {
  if (!(t_end >= 0.0)) throw InvalidParameter("t_end must be >= 0");
  return reference_propagate(problem.field, ParticleState{problem.x0, problem.v0, 0.0}, t_end, cfg);
}

double relative_state_error(const ParticleState& numerical, const ParticleState& reference) {
  return norm(numerical.x - reference.x) / norm(reference.x) + norm(numerical.v - reference.v) / norm(reference.v);
}

double global_error(const ProblemSpec& problem, std::string_view method, double h, double t_end,
                    const ReferenceConfig& ref, const IntegratorConfig& base) {
  const std::int64_t n = step_count(t_end, h);
  const double t = static_cast<double>(n) * h;
  const ParticleState exact = reference_solve(problem, t, ref);
  if (method == "reference") return relative_state_error(reference_solve(problem, t, ref), exact);

  IntegratorConfig cfg = base;
  cfg.method = parse_method(method);
  cfg.h = h;
  cfg.validate();
  ParticleState s{problem.x0, problem.v0, 0.0};
  for (std::int64_t i = 0; i < n; ++i) s = step(s, cfg, problem.field).state;
  return relative_state_error(s, exact);
}

}  // namespace cpd
