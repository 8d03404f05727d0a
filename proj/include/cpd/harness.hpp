#pragma once

// Experiment drivers: long-time drift runs, global convergence studies and
// drift-vs-step-size scaling fits.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"
#include "cpd/invariants.hpp"
#include "cpd/reference.hpp"

namespace cpd {

/// Builds the problem for a given epsilon.
struct ProblemSource {
  std::string name;
  std::function<ProblemSpec(double epsilon)> make;
  /// Set when the problem carries its own epsilon (config files).
  std::optional<double> fixed_epsilon;

  static ProblemSource builtin(const std::string& name);
  static ProblemSource fixed(ProblemSpec spec);
};

struct ExperimentPlan {
  ProblemSource problem;
  std::vector<Method> methods;
  double h = 0.01;
  double t_end = 1000.0;
  std::int64_t sample_stride = 1;
  std::vector<double> epsilons{1.0, 1.0 / 8.0, 1.0 / 64.0};
  int quad_nodes = 0;
  double fp_tol = 1e-16;
  int fp_max_iter = 50;
  /// Worker count; 0 reads CPD_THREADS, then falls back to the hardware count.
  int threads = 0;

  /// Throws InvalidParameter.
  void validate() const;
};

struct MaxDrift {
  double H = 0.0;
  double Hh = 0.0;
  double M = 0.0;
  double I = 0.0;

  double get(Channel c) const;
};

struct CellResult {
  Method method = Method::ExsO2;
  double epsilon = 1.0;
  double h = 0.0;
  int quad_nodes = 0;
  IntegrationStatus status = IntegrationStatus::Ok;
  std::string message;
  DriftSeries series;
  MaxDrift max;
  double wall_seconds = 0.0;
  std::int64_t steps = 0;
  std::int64_t steps_requested = 0;
  double realized_t_end = 0.0;
  FixedPointStats fp;

  bool ok() const { return status == IntegrationStatus::Ok; }
};

/// Cells ordered method-major in plan order, then by epsilon in plan order.
struct ExperimentResult {
  std::string problem;
  std::vector<CellResult> cells;

  bool all_ok() const;
};

ExperimentResult run_drift_experiment(const ExperimentPlan& plan);

struct ConvergenceRow {
  int k = 0;
  double h = 0.0;
  std::vector<double> errors;  // one per method
};

struct ConvergenceTable {
  std::vector<Method> methods;
  std::vector<ConvergenceRow> rows;
  std::vector<double> slopes;  // least-squares d log(error) / d log(h), per method
};

/// h = 2^-k for k in [k_min, k_max].
ConvergenceTable run_convergence_study(const ProblemSpec& problem, const std::vector<Method>& methods, int k_min,
                                       int k_max, double t_end, const ReferenceConfig& ref = {1e-13, 1e-13},
                                       const IntegratorConfig& base = {}, int threads = 0);

struct PreconditionCheck {
  std::string name;
  bool passed = false;
};

/// Whether the conservation theorem for (method, channel) applies to `problem`,
/// with the individual conditions that were checked.
struct TheoremCoverage {
  bool covered = false;
  std::vector<PreconditionCheck> checks;
};

TheoremCoverage theorem_coverage(const ProblemSpec& problem, Method method, Channel channel);

struct ScalingPoint {
  double h = 0.0;
  double max_drift = 0.0;
  /// Max drift over [0, early_window].
  double early_max_drift = 0.0;
  IntegrationStatus status = IntegrationStatus::Ok;
};

struct ScalingResult {
  Method method = Method::ExsO2;
  Channel channel = Channel::H;
  double t_end = 0.0;
  double early_window = 0.0;
  std::vector<ScalingPoint> points;
  double exponent = 0.0;
  TheoremCoverage coverage;

  /// No secular growth: every max over [0, t_end] <= factor * max over [0, early_window].
  bool bounded(double factor = 2.0) const;
};

/// early_window <= 0 selects t_end / 10.
ScalingResult run_drift_scaling(const ProblemSpec& problem, Method method, const std::vector<double>& h_list,
                                double t_end, Channel channel, double early_window = 0.0,
                                const IntegratorConfig& base = {}, int threads = 0);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Resolves a requested worker count (0: CPD_THREADS or hardware).
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

Channel parse_channel(std::string_view name);
std::string_view channel_name(Channel c);

}  // namespace cpd
