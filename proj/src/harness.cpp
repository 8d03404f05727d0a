#include "cpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace cpd {

namespace {

constexpr double kCommuteTol = 1e-12;

bool commute(const Mat3& a, const Mat3& b) {
  const double scale = std::max(1e-300, max_abs(a) * max_abs(b));
  return max_abs(a * b - b * a) <= kCommuteTol * scale;
}

/// S == c B~ for some c != 0, i.e. S v is parallel to v x B.
bool proportional(const Mat3& s, const Mat3& bt) {
  double sb = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < 9; ++i) {
    sb += s.a[i] * bt.a[i];
    bb += bt.a[i] * bt.a[i];
  }
  if (bb == 0.0 || sb == 0.0) return false;
  const double c = sb / bb;
  return max_abs(s - c * bt) <= kCommuteTol * max_abs(s);
}

IntegratorConfig make_config(const ExperimentPlan& plan, Method m) {
  IntegratorConfig cfg;
  cfg.method = m;
  cfg.h = plan.h;
  cfg.quad_nodes = plan.quad_nodes;
  cfg.fp_tol = plan.fp_tol;
  cfg.fp_max_iter = plan.fp_max_iter;
  return cfg;
}

}  // namespace

ProblemSource ProblemSource::builtin(const std::string& name) {
  builtin_problem(name, 1.0);  // validates the name
  return ProblemSource{name, [name](double eps) { return builtin_problem(name, eps); }, std::nullopt};
}

ProblemSource ProblemSource::fixed(ProblemSpec spec) {
  const double eps = spec.epsilon;
  std::string name = spec.name;
  return ProblemSource{std::move(name), [spec = std::move(spec)](double) { return spec; }, eps};
}

void ExperimentPlan::validate() const {
  if (!problem.make) throw InvalidParameter("experiment plan has no problem");
  if (methods.empty()) throw InvalidParameter("experiment plan has no methods");
  if (!(h > 0.0)) throw InvalidParameter("h must be positive");
  if (!(t_end >= 0.0)) throw InvalidParameter("t_end must be >= 0");
  if (sample_stride < 1) throw InvalidParameter("sample_stride must be >= 1");
  if (t_end / h > 2147483648.0) throw InvalidParameter("t_end / h exceeds 2^31 steps");
  if (epsilons.empty()) throw InvalidParameter("experiment plan has no epsilon values");
  for (double e : epsilons)
    if (!(e > 0.0)) throw InvalidParameter("epsilon values must be positive");
  if (quad_nodes < 0) throw InvalidParameter("quad_nodes must be >= 0");
  if (!(fp_tol > 0.0) || fp_max_iter < 1) throw InvalidParameter("invalid fixed-point controls");
}

double MaxDrift::get(Channel c) const {
  switch (c) {
    case Channel::H:
      return H;
    case Channel::Hh:
      return Hh;
    case Channel::M:
      return M;
    case Channel::I:
      return I;
  }
  return H;
}

bool ExperimentResult::all_ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok(); });
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CPD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(resolve_threads(threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_drift_experiment(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<double> epsilons = plan.epsilons;
  if (plan.problem.fixed_epsilon) epsilons = {*plan.problem.fixed_epsilon};

  ExperimentResult result;
  result.problem = plan.problem.name;
  for (Method m : plan.methods)
    for (double eps : epsilons) {
      CellResult cell;
      cell.method = m;
      cell.epsilon = eps;
      cell.h = plan.h;
      result.cells.push_back(std::move(cell));
    }

  parallel_for(result.cells.size(), plan.threads, [&](std::size_t i) {
    CellResult& cell = result.cells[i];
    const ProblemSpec problem = plan.problem.make(cell.epsilon);
    const IntegratorConfig cfg = make_config(plan, cell.method);
    cell.quad_nodes = cell.method == Method::ImsO2 ? effective_quad_nodes(cfg, problem.field) : 0;

    const auto start = std::chrono::steady_clock::now();
    Trajectory traj = integrate(problem, cfg, plan.t_end, plan.sample_stride);
    cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cell.status = traj.status;
    cell.message = traj.message;
    cell.steps = traj.steps_taken;
    cell.steps_requested = traj.steps_requested;
    cell.realized_t_end = traj.realized_t_end;
    cell.fp = traj.fp;

    try {
      cell.series = drift_series(traj.samples, problem, plan.h);
    } catch (const Error& e) {
      cell.status = IntegrationStatus::DomainError;
      cell.message = e.what();
      return;
    }
    cell.max = {cell.series.max_drift(Channel::H), cell.series.max_drift(Channel::Hh),
                cell.series.max_drift(Channel::M), cell.series.max_drift(Channel::I)};
  });
  return result;
}

ConvergenceTable run_convergence_study(const ProblemSpec& problem, const std::vector<Method>& methods, int k_min,
                                       int k_max, double t_end, const ReferenceConfig& ref,
                                       const IntegratorConfig& base, int threads) {
  if (methods.empty()) throw InvalidParameter("convergence study needs at least one method");
  if (k_min > k_max) throw InvalidParameter("empty k range");
  if (k_min < 0 || k_max > 40) throw InvalidParameter("k range must lie in [0, 40]");

  ConvergenceTable table;
  table.methods = methods;
  std::vector<double> times;
  for (int k = k_min; k <= k_max; ++k) {
    ConvergenceRow row;
    row.k = k;
    row.h = std::ldexp(1.0, -k);
    row.errors.assign(methods.size(), 0.0);
    times.push_back(static_cast<double>(step_count(t_end, row.h)) * row.h);
    table.rows.push_back(std::move(row));
  }

  std::map<double, ParticleState> exact;
  for (double t : times) exact.try_emplace(t);
  std::vector<double> distinct;
  for (const auto& [t, _] : exact) distinct.push_back(t);
  parallel_for(distinct.size(), threads, [&](std::size_t i) { exact.at(distinct[i]) = reference_solve(problem, distinct[i], ref); });

  const std::size_t nm = methods.size();
  parallel_for(table.rows.size() * nm, threads, [&](std::size_t cell) {
    ConvergenceRow& row = table.rows[cell / nm];
    IntegratorConfig cfg = base;
    cfg.method = methods[cell % nm];
    cfg.h = row.h;
    cfg.validate();
    const std::int64_t n = step_count(t_end, row.h);
    ParticleState s{problem.x0, problem.v0, 0.0};
    for (std::int64_t j = 0; j < n; ++j) s = step(s, cfg, problem.field).state;
    row.errors[cell % nm] = relative_state_error(s, exact.at(times[cell / nm]));
  });

  std::vector<double> hs;
  for (const auto& row : table.rows) hs.push_back(row.h);
  for (std::size_t m = 0; m < nm; ++m) {
    std::vector<double> errs;
    for (const auto& row : table.rows) errs.push_back(row.errors[m]);
    table.slopes.push_back(fit_loglog_slope(hs, errs));
  }
  return table;
}

TheoremCoverage theorem_coverage(const ProblemSpec& problem, Method method, Channel channel) {
  TheoremCoverage out;
  const auto b = problem.field.constant_B();
  const auto quad = problem.field.quadratic();
  const bool splitting = method == Method::ImsO2 || method == Method::ExsO2;

  auto add = [&](std::string name, bool ok) {
    out.checks.push_back({std::move(name), ok});
    return ok;
  };

  switch (channel) {
    case Channel::H:
      if (method == Method::ImsO2) {
        out.covered = add("IMS-O2 conserves H exactly", true);
      } else if (method == Method::ExsO2) {
        const bool cb = add("B constant", b.has_value());
        const bool qu = add("U quadratic", quad.has_value());
        out.covered = cb || qu;
      } else {
        out.covered = add("method is a symmetric splitting", false);
      }
      break;
    case Channel::Hh:
      out.covered = add("method is EXS-O2", method == Method::ExsO2) && add("U quadratic", quad.has_value());
      break;
    case Channel::M: {
      const bool sp = add("method is a symmetric splitting", splitting);
      const bool cb = add("B constant", b.has_value());
      const bool qu = add("U quadratic", quad.has_value());
      bool rest = false;
      if (cb && qu) {
        const Mat3& S = problem.S.matrix();
        const bool qs = add("QS == SQ", commute(quad->Q, S));
        const bool sb = add("S v parallel to v x B", proportional(S, skew_matrix_of(*b)));
        const bool sq = add("S q == 0", max_abs(S * quad->q) == 0.0);
        rest = qs && sb && sq;
      }
      out.covered = sp && cb && qu && rest;
      break;
    }
    case Channel::I: {
      const bool sp = add("method is a symmetric splitting", splitting);
      const bool cb = add("B constant", b.has_value());
      const bool qu = add("U quadratic", quad.has_value());
      bool rest = false;
      if (cb && qu) {
        const double bn = norm(*b);
        rest = add("B nonzero", bn > 0.0) && add("Q B^ == B^ Q", commute(quad->Q, skew_matrix_of(*b / bn)));
      }
      out.covered = sp && cb && qu && rest;
      break;
    }
  }
  return out;
}

bool ScalingResult::bounded(double factor) const {
  return std::all_of(points.begin(), points.end(),
                     [&](const ScalingPoint& p) { return p.max_drift <= factor * p.early_max_drift; });
}

ScalingResult run_drift_scaling(const ProblemSpec& problem, Method method, const std::vector<double>& h_list,
                                double t_end, Channel channel, double early_window, const IntegratorConfig& base,
                                int threads) {
  if (h_list.size() < 2) throw InvalidParameter("drift scaling needs at least two step sizes");
  ScalingResult out;
  out.method = method;
  out.channel = channel;
  out.t_end = t_end;
  out.early_window = early_window > 0.0 ? early_window : t_end / 10.0;
  out.coverage = theorem_coverage(problem, method, channel);
  out.points.resize(h_list.size());

  parallel_for(h_list.size(), threads, [&](std::size_t i) {
    IntegratorConfig cfg = base;
    cfg.method = method;
    cfg.h = h_list[i];
    ScalingPoint& p = out.points[i];
    p.h = h_list[i];
    const Trajectory traj = integrate(problem, cfg, t_end);
    p.status = traj.status;
    const DriftSeries series = drift_series(traj.samples, problem, cfg.h);
    p.max_drift = series.max_drift(channel);
    p.early_max_drift = series.max_drift(channel, out.early_window);
  });

  std::vector<double> hs;
  std::vector<double> drifts;
  for (const auto& p : out.points) {
    hs.push_back(p.h);
    drifts.push_back(p.max_drift);
  }
  out.exponent = fit_loglog_slope(hs, drifts);
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("slope fit needs >= 2 paired points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidParameter("log-log fit needs positive values");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidParameter("slope fit needs distinct x values");
  return (n * sxy - sx * sy) / denom;
}

Channel parse_channel(std::string_view name) {
  if (name == "H") return Channel::H;
  if (name == "Hh" || name == "H_h") return Channel::Hh;
  if (name == "M") return Channel::M;
  if (name == "I") return Channel::I;
  throw NotFound("unknown channel '" + std::string(name) + "'");
}

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::H:
      return "H";
    case Channel::Hh:
      return "Hh";
    case Channel::M:
      return "M";
    case Channel::I:
      return "I";
  }
  return "?";
}

}  // namespace cpd
