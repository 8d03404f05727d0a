#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cpd/problem_config.hpp"

namespace cpd::cli {

namespace {

using nlohmann::json;

constexpr double kLongHorizon = 10000.0;

struct CommonOptions {
  std::string problem = "problem1";
  std::string problem_file;
  std::vector<std::string> methods;
  std::vector<double> epsilons;
  int quad_nodes = 0;
  double fp_tol = 1e-16;
  int fp_max_iter = 50;
  std::string out_dir = ".";
};

struct RunOptions {
  double h = 0.01;
  double t_end = 1000.0;
  bool full = false;
  std::int64_t stride = 100;
};

struct ConvergeOptions {
  std::string k_range = "6..12";
  double t_end = 1.0;
  double rtol = 1e-13;
};

struct ScalingOptions {
  std::vector<double> h_list{0.04, 0.02, 0.01};
  double t_end = 1000.0;
  bool full = false;
  std::vector<std::string> channels{"H", "M", "I"};
  double early_window = 0.0;
};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->set_help_flag("--help", "print help");
  cmd->add_option("--problem", o.problem, "built-in problem (problem1, problem2, problem3)");
  cmd->add_option("--problem-file", o.problem_file, "problem config file; overrides --problem");
  cmd->add_option("--method", o.methods, "ims-o2, exs-o2 or boris (repeatable)");
  cmd->add_option("--eps", o.epsilons, "field scaling epsilon (repeatable)");
  cmd->add_option("--quad-nodes", o.quad_nodes, "Gauss-Legendre nodes for IMS-O2 (0: automatic)");
  cmd->add_option("--fp-tol", o.fp_tol, "fixed-point increment tolerance");
  cmd->add_option("--fp-max-iter", o.fp_max_iter, "fixed-point iteration cap");
  cmd->add_option("--out-dir", o.out_dir, "directory for output files");
}

std::vector<Method> resolve_methods(const CommonOptions& o, std::vector<Method> fallback) {
  if (o.methods.empty()) return fallback;
  std::vector<Method> out;
  for (const auto& m : o.methods) out.push_back(parse_method(m));
  return out;
}

ProblemSource resolve_source(const CommonOptions& o) {
  if (!o.problem_file.empty()) return ProblemSource::fixed(load_problem(o.problem_file));
  return ProblemSource::builtin(o.problem);
}

std::vector<double> resolve_epsilons(const CommonOptions& o, const ProblemSource& src) {
  if (src.fixed_epsilon) return {*src.fixed_epsilon};
  return o.epsilons.empty() ? ExperimentPlan{}.epsilons : o.epsilons;
}

IntegratorConfig base_config(const CommonOptions& o) {
  IntegratorConfig cfg;
  cfg.quad_nodes = o.quad_nodes;
  cfg.fp_tol = o.fp_tol;
  cfg.fp_max_iter = o.fp_max_iter;
  return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << body;
}

json metadata(const std::string& problem) {
  return json{{"problem", problem}, {"version", kVersion}};
}

std::pair<int, int> parse_k_range(const std::string& s) {
  const auto dots = s.find("..");
  auto to_int = [&](std::string_view part) {
    int v = 0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || p != part.data() + part.size()) throw InvalidParameter("bad --k range '" + s + "'");
    return v;
  };
  if (dots == std::string::npos) {
    const int k = to_int(s);
    return {k, k};
  }
  return {to_int(std::string_view(s).substr(0, dots)), to_int(std::string_view(s).substr(dots + 2))};
}

int cmd_run(const CommonOptions& common, const RunOptions& opts, std::ostream& out) {
  ExperimentPlan plan;
  plan.problem = resolve_source(common);
  plan.methods = resolve_methods(common, all_methods());
  plan.h = opts.h;
  plan.t_end = opts.full ? kLongHorizon : opts.t_end;
  plan.sample_stride = opts.stride;
  plan.epsilons = resolve_epsilons(common, plan.problem);
  plan.quad_nodes = common.quad_nodes;
  plan.fp_tol = common.fp_tol;
  plan.fp_max_iter = common.fp_max_iter;
  plan.validate();

  const auto dir = prepare_out_dir(common.out_dir);
  const ExperimentResult result = run_drift_experiment(plan);

  json summary = metadata(result.problem);
  summary["h"] = plan.h;
  summary["t_end"] = plan.t_end;
  summary["stride"] = plan.sample_stride;
  summary["cells"] = json::array();
  for (const CellResult& cell : result.cells) {
    const std::string stem = cell_stem(result.problem, cell.method, cell.epsilon);
    write_file(dir / (stem + ".csv"), drift_csv(cell.series));
    if (!cell.ok()) write_file(dir / (stem + ".csv.failed"), cell.message + "\n");

    const double mean_iter =
        cell.steps > 0 ? static_cast<double>(cell.fp.total_iterations) / static_cast<double>(cell.steps) : 0.0;
    summary["cells"].push_back(json{
        {"method", method_name(cell.method)},
        {"epsilon", cell.epsilon},
        {"h", cell.h},
        {"status", status_name(cell.status)},
        {"message", cell.message},
        {"csv", stem + ".csv"},
        {"rows", cell.series.size()},
        {"steps", cell.steps},
        {"steps_requested", cell.steps_requested},
        {"t_end", cell.realized_t_end},
        {"quad_nodes", cell.quad_nodes},
        {"wall_seconds", cell.wall_seconds},
        {"fp", {{"total_iterations", cell.fp.total_iterations},
                {"mean_iterations", mean_iter},
                {"max_iterations", cell.fp.max_iterations},
                {"stagnated_steps", cell.fp.stagnated_steps}}},
        {"max_drift", {{"e_H", cell.max.H}, {"e_Hh", cell.max.Hh}, {"e_M", cell.max.M}, {"e_I", cell.max.I}}},
        {"absolute_drift",
         {{"e_H", cell.series.absolute.H},
          {"e_Hh", cell.series.absolute.Hh},
          {"e_M", cell.series.absolute.M},
          {"e_I", cell.series.absolute.I}}},
    });
    out << method_name(cell.method) << " eps=" << shortest(cell.epsilon) << " status=" << status_name(cell.status)
        << " max e_H=" << format_real(cell.max.H) << " e_Hh=" << format_real(cell.max.Hh)
        << " e_M=" << format_real(cell.max.M) << " e_I=" << format_real(cell.max.I) << '\n';
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return result.all_ok() ? kExitOk : kExitNumerical;
}

int cmd_converge(const CommonOptions& common, const ConvergeOptions& opts, std::ostream& out) {
  const auto [k_min, k_max] = parse_k_range(opts.k_range);
  const ProblemSource src = resolve_source(common);
  const std::vector<Method> methods = resolve_methods(common, all_methods());
  const auto dir = prepare_out_dir(common.out_dir);

  json summary = metadata(src.name);
  summary["t_end"] = opts.t_end;
  summary["studies"] = json::array();
  for (double eps : resolve_epsilons(common, src)) {
    const ProblemSpec problem = src.make(eps);
    const ConvergenceTable table = run_convergence_study(problem, methods, k_min, k_max, opts.t_end,
                                                         ReferenceConfig{opts.rtol, opts.rtol}, base_config(common));
    std::ostringstream csv;
    csv << "k,h";
    for (Method m : methods) csv << ',' << method_name(m);
    csv << '\n';
    for (const auto& row : table.rows) {
      csv << row.k << ',' << format_real(row.h);
      for (double e : row.errors) csv << ',' << format_real(e);
      csv << '\n';
    }
    const std::string file = "convergence_" + src.name + "_eps" + shortest(eps) + ".csv";
    write_file(dir / file, csv.str());

    json slopes = json::object();
    for (std::size_t i = 0; i < methods.size(); ++i) {
      slopes[std::string(method_name(methods[i]))] = table.slopes[i];
      out << "eps=" << shortest(eps) << ' ' << method_name(methods[i]) << " slope=" << table.slopes[i] << '\n';
    }
    summary["studies"].push_back(json{{"epsilon", eps}, {"csv", file}, {"slopes", slopes}});
  }
  write_file(dir / "convergence.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_scaling(const CommonOptions& common, const ScalingOptions& opts, std::ostream& out) {
  const ProblemSource src = resolve_source(common);
  const std::vector<Method> methods = resolve_methods(common, {Method::ImsO2, Method::ExsO2});
  const double t_end = opts.full ? kLongHorizon : opts.t_end;
  const auto dir = prepare_out_dir(common.out_dir);

  json summary = metadata(src.name);
  summary["t_end"] = t_end;
  summary["h"] = opts.h_list;
  summary["results"] = json::array();
  bool all_ok = true;
  for (double eps : resolve_epsilons(common, src)) {
    const ProblemSpec problem = src.make(eps);
    for (Method m : methods)
      for (const auto& ch_name : opts.channels) {
        const Channel ch = parse_channel(ch_name);
        const ScalingResult r =
            run_drift_scaling(problem, m, opts.h_list, t_end, ch, opts.early_window, base_config(common));
        json checks = json::array();
        for (const auto& c : r.coverage.checks) checks.push_back(json{{"condition", c.name}, {"holds", c.passed}});
        json points = json::array();
        for (const auto& p : r.points) {
          all_ok = all_ok && p.status == IntegrationStatus::Ok;
          points.push_back(json{{"h", p.h},
                                {"max_drift", p.max_drift},
                                {"early_max_drift", p.early_max_drift},
                                {"status", status_name(p.status)}});
        }
        summary["results"].push_back(json{{"epsilon", eps},
                                          {"method", method_name(m)},
                                          {"channel", channel_name(ch)},
                                          {"exponent", r.exponent},
                                          {"bounded", r.bounded()},
                                          {"early_window", r.early_window},
                                          {"theorem_covered", r.coverage.covered},
                                          {"preconditions", checks},
                                          {"points", points}});
        out << "eps=" << shortest(eps) << ' ' << method_name(m) << " channel=" << channel_name(ch)
            << " exponent=" << r.exponent << " bounded=" << (r.bounded() ? "yes" : "no")
            << (r.coverage.covered ? "" : " (informational: theorem preconditions not met)") << '\n';
      }
  }
  write_file(dir / "scaling.json", summary.dump(2) + "\n");
  return all_ok ? kExitOk : kExitNumerical;
}

int cmd_list(std::ostream& out) {
  out << "methods: ims-o2 exs-o2 boris\n";
  out << "problems (epsilon = 1):\n";
  for (const auto& name : builtin_problem_names()) {
    const ProblemSpec p = builtin_problem(name, 1.0);
    out << "  " << name << "  constant_B=" << (p.field.is_constant_B() ? "yes" : "no")
        << " quadratic_U=" << (p.field.is_quadratic_U() ? "yes" : "no") << '\n';
    for (Method m : all_methods()) {
      out << "    " << method_name(m) << ':';
      for (Channel c : kChannels) {
        out << ' ' << channel_name(c) << '=' << (theorem_coverage(p, m, c).covered ? "covered" : "-");
      }
      out << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

std::string drift_csv(const DriftSeries& series) {
  std::string body = "t,e_H,e_Hh,e_M,e_I\n";
  body.reserve(body.size() + series.size() * 5 * 24);
  for (std::size_t i = 0; i < series.size(); ++i) {
    body += format_real(series.times[i]);
    for (const auto* ch : {&series.e_H, &series.e_Hh, &series.e_M, &series.e_I}) {
      body += ',';
      body += format_real((*ch)[i]);
    }
    body += '\n';
  }
  return body;
}

std::string cell_stem(const std::string& problem, Method method, double epsilon) {
  return problem + "_" + std::string(method_name(method)) + "_eps" + shortest(epsilon);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-preserving integrators for charged-particle dynamics"};
  app.set_help_flag("--help", "print help");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions run_common, conv_common, scal_common;
  RunOptions run_opts;
  ConvergeOptions conv_opts;
  ScalingOptions scal_opts;

  auto* run = app.add_subcommand("run", "long-time invariant drift experiment");
  add_common(run, run_common);
  run->add_option("--h", run_opts.h, "step size");
  run->add_option("--t-end", run_opts.t_end, "integration horizon");
  run->add_flag("--full", run_opts.full, "use the 10^4 horizon");
  run->add_option("--stride", run_opts.stride, "keep every stride-th step");

  auto* conv = app.add_subcommand("converge", "global error convergence study, h = 2^-k");
  add_common(conv, conv_common);
  conv->add_option("--k", conv_opts.k_range, "k range, e.g. 6..12");
  conv->add_option("--t-end", conv_opts.t_end, "time at which the error is measured");
  conv->add_option("--ref-tol", conv_opts.rtol, "reference solver tolerance");

  auto* scal = app.add_subcommand("scaling", "fit drift exponents against h");
  add_common(scal, scal_common);
  scal->add_option("--h", scal_opts.h_list, "step sizes (repeatable)");
  scal->add_option("--t-end", scal_opts.t_end, "integration horizon");
  scal->add_flag("--full", scal_opts.full, "use the 10^4 horizon");
  scal->add_option("--channel", scal_opts.channels, "H, Hh, M or I (repeatable)");
  scal->add_option("--early-window", scal_opts.early_window, "window for the bounded-drift check (default t_end/10)");

  auto* list = app.add_subcommand("list", "built-in problems, methods and theorem coverage");
  list->set_help_flag("--help", "print help");

  std::vector<const char*> argv{"cpd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (run->parsed()) return cmd_run(run_common, run_opts, out);
    if (conv->parsed()) return cmd_converge(conv_common, conv_opts, out);
    if (scal->parsed()) return cmd_scaling(scal_common, scal_opts, out);
    if (list->parsed()) return cmd_list(out);
  } catch (const Diverged& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalBlowup& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const MaxStepsExceeded& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const StiffnessSuspected& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace cpd::cli
