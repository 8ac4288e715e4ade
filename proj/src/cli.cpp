#include "ipld/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ipld/applications.hpp"
#include "ipld/baseline_cp.hpp"
#include "ipld/errors.hpp"
#include "ipld/io.hpp"
#include "ipld/path_following.hpp"

namespace ipld {

namespace {

struct ProblemArgs {
  std::string problem;
  std::string edges;
  std::string dsl;
  int synthetic = 0;
  int users = 7;
  int bfs_nodes = 0;
  int root = 0;
  double pair_density = 1.0;
  std::uint64_t seed = 1;
};

struct SolverArgs {
  double t0 = 0.25;
  double beta = 0.05;
  double eps = 1e-3;
  double delta = 1e-5;
  double eps_master = 1e-5;
  long long kmax = 0;
  bool no_tolerance_cap = false;
  bool practical_stop = false;
  double stop_feas = 1e-5;
  double stop_gap = 1e-6;
};

void add_problem_options(CLI::App& app, ProblemArgs& p) {
  app.add_option("--problem", p.problem, "num or dsl")
      ->required()
      ->check(CLI::IsMember({"num", "dsl"}));
  app.add_option("--edges", p.edges, "edge-list file (num)");
  app.add_option("--dsl", p.dsl, "DSL matrix file (dsl)");
  app.add_option("--synthetic", p.synthetic, "synthetic size: nodes (num) or channels (dsl)")
      ->check(CLI::PositiveNumber);
  app.add_option("--users", p.users, "users per channel for synthetic dsl")
      ->check(CLI::PositiveNumber);
  app.add_option("--bfs-nodes", p.bfs_nodes, "keep the BFS ball of this many nodes (edge lists)");
  app.add_option("--root", p.root, "BFS ball root node");
  app.add_option("--pair-density", p.pair_density, "fraction of source-destination pairs kept")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", p.seed, "random seed");
}

void add_solver_options(CLI::App& app, SolverArgs& s) {
  app.add_option("--t0", s.t0, "initial penalty parameter in (0, 1]");
  app.add_option("--beta", s.beta, "neighborhood size in (0, 0.1]");
  app.add_option("--eps", s.eps, "target accuracy");
  app.add_option("--delta-slave", s.delta, "slave accuracy delta_k");
  app.add_option("--eps-master", s.eps_master, "master accuracy eps_k");
  app.add_option("--kmax", s.kmax, "main-loop iteration cap (0: derived bound)");
  app.add_flag("--no-tolerance-cap", s.no_tolerance_cap, "allow tolerances above beta/100");
  app.add_flag("--practical-stop", s.practical_stop,
               "also stop on feasibility and relative gap");
  app.add_option("--stop-feas", s.stop_feas, "feasibility threshold of --practical-stop");
  app.add_option("--stop-gap", s.stop_gap, "relative gap threshold of --practical-stop");
}

SolverConfig make_config(const SolverArgs& s) {
  SolverConfig c;
  c.t0 = s.t0;
  c.beta = s.beta;
  c.eps = s.eps;
  c.delta = s.delta;
  c.eps_master = s.eps_master;
  c.kmax = s.kmax;
  c.enforce_tolerance_cap = !s.no_tolerance_cap;
  if (s.practical_stop) c.practical_stop = PracticalStop{s.stop_feas, s.stop_gap};
  c.validate();
  return c;
}

std::map<std::string, std::string> echo(const ProblemArgs& p, const SolverArgs& s) {
  std::map<std::string, std::string> m;
  m["problem"] = p.problem;
  if (!p.edges.empty()) m["edges"] = p.edges;
  if (!p.dsl.empty()) m["dsl"] = p.dsl;
  if (p.synthetic > 0) m["synthetic"] = std::to_string(p.synthetic);
  if (p.bfs_nodes > 0) m["bfs_nodes"] = std::to_string(p.bfs_nodes);
  m["seed"] = std::to_string(p.seed);
  m["pair_density"] = format_double(p.pair_density);
  m["t0"] = format_double(s.t0);
  m["beta"] = format_double(s.beta);
  m["eps"] = format_double(s.eps);
  m["delta_slave"] = format_double(s.delta);
  m["eps_master"] = format_double(s.eps_master);
  return m;
}

struct LoadedProblem {
  std::optional<NumModel> num;
  std::optional<DslData> dsl;
  std::optional<ProblemInstance> dsl_instance;

  const ProblemInstance& instance() const { return num ? num->problem() : *dsl_instance; }
};

LoadedProblem load_problem(const ProblemArgs& p) {
  LoadedProblem out;
  if (p.problem == "num") {
    Network net;
    if (!p.edges.empty()) {
      std::vector<std::string> warnings;
      net = parse_edge_list(p.edges, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      if (p.bfs_nodes > 0) net = bfs_ball(net, p.root, p.bfs_nodes);
    } else if (p.synthetic > 0) {
      net = random_network(p.synthetic, p.seed);
    } else {
      throw ConfigError("--problem num needs --edges or --synthetic");
    }
    NumOptions options;
    options.pair_density = p.pair_density;
    out.num = build_num_instance(net, generate_num(net, p.seed, options));
    for (const auto& w : out.num->warnings) std::cerr << "warning: " << w << '\n';
  } else {
    if (!p.dsl.empty()) {
      out.dsl = read_dsl(p.dsl);
    } else if (p.synthetic > 0) {
      out.dsl = generate_dsl(p.users, p.synthetic, p.seed);
    } else {
      throw ConfigError("--problem dsl needs --dsl or --synthetic");
    }
    out.dsl_instance.emplace(build_dsl_instance(*out.dsl));
  }
  return out;
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int e = 0; e >= -8; --e) grid.push_back(std::pow(10.0, e));
  return grid;
}

int status_code(const std::vector<RunResult>& runs) {
  for (const auto& r : runs) {
    if (!r.converged) return 2;
  }
  return 0;
}

int run_solve(const ProblemArgs& p, const SolverArgs& s, std::vector<std::string> solvers,
              const std::vector<double>& taus, const std::string& out_path,
              const std::string& trace_path, bool diagnostics) {
  if (solvers.empty()) solvers.push_back("ipld");
  SolverConfig config = make_config(s);
  config.diagnostics = diagnostics;
  const LoadedProblem loaded = load_problem(p);
  const ProblemInstance& inst = loaded.instance();
  std::cout << "instance: rows " << inst.num_rows() << ", blocks " << inst.num_blocks()
            << ", variables " << inst.total_dim() << ", nu " << inst.nu() << '\n';

  std::vector<RunResult> runs;
  for (const auto& solver : solvers) {
    if (solver == "ipld") {
      const SolveResult result = solve(inst, config);
      RunResult run = make_run_result(result, p.problem);
      run.config = echo(p, s);
      if (!trace_path.empty()) {
        write_trace(trace_path, result.trace);
        run.trace_path = trace_path;
      }
      std::cout << "ipld: " << run.status << ", iterations " << run.iterations << " (phase 1 "
                << run.phase1_iterations << "), objective " << format_double(run.objective)
                << ", feasibility " << run.feasibility << ", time " << run.wall_ms << " ms\n";
      if (diagnostics) {
        const NeighborhoodReport report =
            neighborhood_diagnostics(result.trace, config.beta, result.sigma, inst.nu());
        std::size_t failed = 0;
        for (const auto& c : report.checks) failed += c.passed() ? 0 : 1;
        std::cout << "diagnostics: " << report.checks.size() - failed << " of "
                  << report.checks.size() << " iterations satisfy all neighborhood bounds\n";
        run.config["diagnostics_failed"] = std::to_string(failed);
      }
      runs.push_back(std::move(run));
    } else if (solver == "cp") {
      if (!loaded.num) throw ConfigError("the cp baseline is available for --problem num only");
      const CpProblem cp = build_cp_num(*loaded.num);
      const CpResult result = cp_solve_grid(cp, taus.empty() ? default_tau_grid() : taus);
      RunResult run;
      run.solver = "cp";
      run.problem = p.problem;
      run.status = result.converged ? "converged" : "iteration_cap";
      run.converged = result.converged;
      run.objective = result.objective;
      run.feasibility = result.feasibility;
      run.relative_gap = result.relative_gap;
      run.iterations = result.iterations;
      run.wall_ms = result.wall_ms;
      run.config = echo(p, s);
      run.config["tau"] = format_double(result.tau);
      run.config["sigma"] = format_double(result.sigma);
      std::cout << "cp: " << run.status << ", iterations " << run.iterations << ", tau "
                << result.tau << ", objective " << format_double(run.objective)
                << ", feasibility " << run.feasibility << ", time " << run.wall_ms << " ms\n";
      runs.push_back(std::move(run));
    } else {
      throw ConfigError("unknown solver '" + solver + "'");
    }
  }
  if (runs.size() == 2) {
    const double diff = std::abs(runs[0].objective - runs[1].objective) /
                        std::max(1.0, std::abs(runs[1].objective));
    std::cout << "relative objective difference: " << diff << '\n';
  }
  if (!out_path.empty()) {
    if (runs.size() == 1) {
      write_result(out_path, runs.front());
    } else {
      write_results(out_path, runs);
    }
  }
  return status_code(runs);
}

std::vector<double> decade_grid(int hi, int lo) {
  std::vector<double> grid;
  for (int e = hi; e >= lo; --e) grid.push_back(std::pow(10.0, e));
  return grid;
}

int run_sweep(const ProblemArgs& p, SolverArgs s, const std::string& param,
              std::vector<double> grid, const std::string& out_dir) {
  s.no_tolerance_cap = true;
  s.practical_stop = true;
  const LoadedProblem loaded = load_problem(p);
  const ProblemInstance& inst = loaded.instance();
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> params;
  if (param == "both") {
    params = {"eps", "delta"};
  } else {
    params = {param};
  }
  std::string summary = "param,value,iterations,wall_ms,objective,feasibility,relative_gap,status\n";
  int code = 0;
  for (const auto& which : params) {
    std::vector<double> values = grid;
    if (values.empty()) values = which == "eps" ? decade_grid(-2, -12) : decade_grid(-2, -8);
    for (double v : values) {
      SolverArgs cell = s;
      cell.eps_master = which == "eps" ? v : 1e-5;
      cell.delta = which == "delta" ? v : 1e-5;
      const SolveResult result = solve(inst, make_config(cell));
      char tag[64];
      std::snprintf(tag, sizeof tag, "%s_%.0e", which.c_str(), v);
      write_trace((std::filesystem::path(out_dir) / (std::string("trace_") + tag + ".csv")).string(),
                  result.trace);
      summary += which + ',' + format_double(v) + ',' + std::to_string(result.trace.size()) + ',' +
                 format_double(result.wall_ms) + ',' + format_double(result.objective) + ',' +
                 format_double(result.feasibility) + ',' + format_double(result.relative_gap) +
                 ',' + to_string(result.status) + '\n';
      std::cout << which << " = " << v << ": " << result.trace.size() << " iterations, "
                << result.wall_ms << " ms, " << to_string(result.status) << '\n';
      if (!result.converged()) code = 2;
    }
  }
  std::ofstream(std::filesystem::path(out_dir) / "sweep_summary.csv") << summary;
  return code;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Inexact interior-point Lagrangian decomposition solver"};
  app.require_subcommand(1);

  ProblemArgs solve_problem;
  SolverArgs solve_solver;
  std::vector<std::string> solvers;
  std::vector<double> taus;
  std::string out_path;
  std::string trace_path;
  bool diagnostics = false;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance");
  add_problem_options(*solve_cmd, solve_problem);
  add_solver_options(*solve_cmd, solve_solver);
  solve_cmd->add_option("--solver", solvers, "ipld and/or cp (repeatable)")
      ->check(CLI::IsMember({"ipld", "cp"}));
  solve_cmd->add_option("--tau", taus, "cp primal step sizes (repeatable; default grid 1..1e-8)")
      ->delimiter(',');
  solve_cmd->add_option("--out", out_path, "result JSON");
  solve_cmd->add_option("--trace", trace_path, "per-iteration CSV");
  solve_cmd->add_flag("--diagnostics", diagnostics, "record and check neighborhood bounds");

  ProblemArgs sweep_problem;
  SolverArgs sweep_solver;
  std::string param = "both";
  std::vector<double> grid;
  std::string out_dir = "sweep";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "tolerance sweep over eps_k or delta_k");
  add_problem_options(*sweep_cmd, sweep_problem);
  add_solver_options(*sweep_cmd, sweep_solver);
  sweep_cmd->add_option("--param", param, "eps, delta or both")
      ->check(CLI::IsMember({"eps", "delta", "both"}));
  sweep_cmd->add_option("--grid", grid, "values to sweep (default: decades)")->delimiter(',');
  sweep_cmd->add_option("--out-dir", out_dir, "directory for traces and the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      return run_solve(solve_problem, solve_solver, solvers, taus, out_path, trace_path,
                       diagnostics);
    }
    return run_sweep(sweep_problem, sweep_solver, param, grid, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << solve_cmd->help() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ipld
