// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.
// Usage: ipld_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipld/applications.hpp"
#include "ipld/errors.hpp"
#include "ipld/baseline_cp.hpp"
#include "ipld/master.hpp"
#include "ipld/oracle.hpp"
#include "ipld/path_following.hpp"
#include "ipld/rng.hpp"
#include "ipld/scalar.hpp"

using namespace ipld;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---------------------------------------------------------------------------
// Criteria 1-3 share one batch of main-loop runs.

struct NumRun {
  int nodes = 0;
  std::uint64_t seed = 0;
  std::int64_t vars = 0;
  double nu = 0.0;
  SolveResult result;
};

constexpr double kBeta = 0.05;
constexpr double kNumEps = 1e-2;

std::optional<NumModel> try_num(int nodes, std::uint64_t seed) {
  const Network net = random_network(nodes, seed);
  NumOptions options;
  // About 3.5 source-destination pairs per node keeps p well under 2000.
  options.pair_density = std::min(1.0, 3.5 / (nodes - 1));
  try {
    return build_num_instance(net, generate_num(net, seed, options));
  } catch (const ConfigError&) {
    return std::nullopt;  // rank-deficient routing matrix
  }
}

const std::vector<NumRun>& num_batch() {
  static std::vector<NumRun> runs;
  static bool done = false;
  if (done) return runs;
  const auto start = std::chrono::steady_clock::now();
  std::vector<NumRun> batch;
  int skipped = 0;
  for (int i = 0; i < 20; ++i) {
    NumRun run;
    run.nodes = 10 + 2 * i;
    std::optional<NumModel> model;
    for (std::uint64_t attempt = 0; !model; ++attempt) {
      run.seed = static_cast<std::uint64_t>(i + 1) + 1000 * attempt;
      model = try_num(run.nodes, run.seed);
      if (!model) ++skipped;
    }
    const ProblemInstance& inst = model->problem();
    run.vars = inst.total_dim();
    run.nu = inst.nu();
    SolverConfig c;
    c.beta = kBeta;
    c.delta = 1e-5;
    c.eps_master = 1e-5;
    c.eps = kNumEps;
    run.result = solve(inst, c);
    batch.push_back(std::move(run));
  }
  runs = std::move(batch);
  done = true;
  std::printf("  [criteria 1-3: 20 NUM runs in %.1f s, %d rank-deficient seeds replaced]\n",
              seconds_since(start), skipped);
  std::fflush(stdout);
  return runs;
}

Verdict criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const auto& runs = num_batch();
  const double elapsed = seconds_since(start);
  Verdict v;
  double worst = 0.0;
  std::size_t iterates = 0;
  std::int64_t max_vars = 0;
  for (const auto& run : runs) {
    max_vars = std::max(max_vars, run.vars);
    for (const auto& it : run.result.trace) {
      ++iterates;
      worst = std::max(worst, it.lambda);
      if (!(it.lambda <= kBeta)) v.pass = false;
    }
  }
  if (max_vars > 2000 || elapsed > 300.0) v.pass = false;
  v.detail = fmt("%zu iterates on 20 instances (10-48 nodes, p <= %lld), max lambda %.3e <= %.2f, %.1f s",
                 iterates, static_cast<long long>(max_vars), worst, kBeta, elapsed);
  return v;
}

Verdict criterion2() {
  Verdict v;
  std::int64_t worst_slack = INT64_MAX;
  for (const auto& run : num_batch()) {
    const SolveResult& r = run.result;
    const double eps_hat = kNumEps / (1.0 + std::sqrt(run.nu));
    const std::int64_t bound = kmax_bound(0.25, eps_hat, sigma_rule(kBeta, run.nu)) + 1;
    const auto count = static_cast<std::int64_t>(r.trace.size());
    worst_slack = std::min(worst_slack, bound - count);
    if (count > bound) v.pass = false;
  }
  v.detail = fmt("iterations <= floor(ln(t0/eps_hat)/(-ln sigma)) + 1 on all 20, min slack %lld",
                 static_cast<long long>(worst_slack));
  return v;
}

Verdict criterion3() {
  Verdict v;
  double worst_primal = 0.0;
  double worst_e = 0.0;
  double worst_r = 0.0;
  int final_ok = 0;
  for (const auto& run : num_batch()) {
    for (const auto& it : run.result.trace) {
      const Certificate& c = it.certificate;
      worst_primal = std::max(worst_primal, c.primal_opt / c.bound_primal);
      worst_e = std::max(worst_e, rel_diff(c.dual_resid_e, c.bound_dual));
      worst_r = std::max(worst_r, rel_diff(c.dual_resid_r, c.bound_dual));
    }
    if (run.result.certificate.satisfies(kNumEps) && run.result.converged()) ++final_ok;
  }
  if (worst_primal > 1.0 + 1e-12 || worst_e > 1e-10 || worst_r > 1e-10 || final_ok != 20) {
    v.pass = false;
  }
  v.detail = fmt("max primal_opt/bound %.4f, dual residual rel. error e %.1e r %.1e, "
                 "final certificate at eps=%.0e on %d/20",
                 worst_primal, worst_e, worst_r, kNumEps, final_ok);
  return v;
}

// ---------------------------------------------------------------------------

Verdict criterion4() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  int entries = 0;
  int failed = 0;
  std::int64_t max_vars = 0;
  for (int i = 0; i < 10; ++i) {
    const int nodes = 4 + i % 2;
    const auto seed = static_cast<std::uint64_t>(100 + i);
    const Network net = random_network(nodes, seed);
    const NumModel model = build_num_instance(net, generate_num(net, seed));
    const ProblemInstance& inst = model.problem();
    max_vars = std::max(max_vars, inst.total_dim());
    Rng rng(seed, "acceptance.oracle");
    const double t = rng.uniform(0.05, 1.0);
    Vec y(inst.num_rows());
    for (Eigen::Index r = 0; r < y.size(); ++r) y[r] = rng.uniform(-1.0, 1.0);
    const OracleErrorReport report = oracle_error_suite(inst, t, y, {0.3, 0.05, 1e-3}, 1e-12);
    for (const auto& e : report.entries) {
      ++entries;
      if (!e.passed()) ++failed;
    }
  }
  const double elapsed = seconds_since(start);
  v.pass = failed == 0 && max_vars <= 20 && elapsed <= 60.0;
  v.detail = fmt("%d/%d (instance, delta) entries satisfy value bracket, Hessian sandwich and "
                 "gradient error, p <= %lld, %.2f s",
                 entries - failed, entries, static_cast<long long>(max_vars), elapsed);
  return v;
}

Verdict criterion5() {
  Verdict v;
  const Network net = random_network(7, 55);
  const NumModel model = build_num_instance(net, generate_num(net, 55));
  const ProblemInstance& inst = model.problem();
  Rng rng(55, "acceptance.fd");
  const auto d_at = [&](double t, const Vec& y) {
    return build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-13)).d_value;
  };
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double t = std::exp(rng.uniform(std::log(0.01), 0.0));
    Vec y(inst.num_rows());
    for (Eigen::Index r = 0; r < y.size(); ++r) y[r] = rng.uniform(-1.0, 1.0);
    const OracleEval e = build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-13));
    Vec fd(y.size());
    for (Eigen::Index r = 0; r < y.size(); ++r) {
      const double h = 1e-5 * t;
      Vec yp = y, ym = y;
      yp[r] += h;
      ym[r] -= h;
      fd[r] = (d_at(t, yp) - d_at(t, ym)) / (2.0 * h);
    }
    worst = std::max(worst, (fd - e.grad).norm() / e.grad.norm());
  }
  v.pass = worst <= 1e-5;
  v.detail = fmt("max relative error of central differences vs gradient %.2e over 50 (y, t)", worst);
  return v;
}

Verdict criterion6() {
  Verdict v;
  double worst = -INFINITY;
  int pairs = 0;
  double smallest_start = INFINITY;
  double largest_start = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto seed = static_cast<std::uint64_t>(200 + i);
    const Network net = random_network(6 + i, seed);
    const NumModel model = build_num_instance(net, generate_num(net, seed));
    const ProblemInstance& inst = model.problem();
    const CompositeTerm& phi = inst.composite();
    const double t = 0.5;
    // Damped steps from y = 0 until the decrement drops below 0.4, so the
    // two measured full steps start well outside the quadratic regime.
    Vec y = Vec::Zero(inst.num_rows());
    for (int j = 0; j < 200; ++j) {
      const OracleEval e = build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-12));
      const GradientMapping g = gradient_mapping(e, phi, 1e-12);
      if (g.lambda_primal < 0.4) break;
      const double alpha = 1.0 / (1.0 + g.lambda_primal);
      y = (1.0 - alpha) * y + alpha * g.prox_point;
    }
    for (int step = 0; step < 2; ++step) {
      const OracleEval e0 = build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-12));
      const GradientMapping g0 = gradient_mapping(e0, phi, 1e-12);
      const Vec y1 = g0.prox_point;
      const OracleEval e1 = build_oracle(inst, t, y1, solve_slave(inst, t, y1, 1e-12));
      const GradientMapping g1 = gradient_mapping(e1, phi, 1e-12);
      const double l0 = g0.lambda_primal;
      const double l1 = g1.lambda_primal;
      const double rhs = l0 * l0 / ((1.0 - l0) * (1.0 - l0));
      if (step == 0) {
        smallest_start = std::min(smallest_start, l0);
        largest_start = std::max(largest_start, l0);
      }
      worst = std::max(worst, l1 - rhs);
      if (!(l0 < 1.0 && l1 <= rhs + 1e-6)) v.pass = false;
      ++pairs;
      y = y1;
    }
  }
  v.detail = fmt("%d successive exact steps, start lambda in [%.3f, %.3f], "
                 "max lambda+ - lambda^2/(1-lambda)^2 = %.2e <= 1e-6",
                 pairs, smallest_start, largest_start, worst);
  return v;
}

Verdict criterion7() {
  Verdict v;
  const double drop = phase1_min_decrease(kBeta);
  double worst_margin = INFINITY;
  int steps = 0;
  int instances = 0;
  double worst_lambda = 0.0;
  const auto check = [&](const ProblemInstance& inst) {
    SolverConfig c;
    c.beta = kBeta;
    const Phase1Result p = phase1(inst, c);
    ++instances;
    worst_lambda = std::max(worst_lambda, p.lambda);
    if (!(p.lambda <= kBeta)) v.pass = false;
    for (std::size_t j = 0; j < p.steps.size(); ++j) {
      const DualPoint& next = j + 1 < p.steps.size() ? p.steps[j + 1].y : p.y0;
      const double before = smoothed_dual_objective(inst, c.t0, p.steps[j].y);
      const double after = smoothed_dual_objective(inst, c.t0, next);
      worst_margin = std::min(worst_margin, (before - after) - drop);
      if (!(before - after >= drop - 1e-8)) v.pass = false;
      ++steps;
    }
  };
  for (int i = 0; i < 6; ++i) {
    const auto seed = static_cast<std::uint64_t>(300 + i);
    const Network net = random_network(8 + 3 * i, seed);
    NumOptions options;
    options.pair_density = 0.5;
    check(build_num_instance(net, generate_num(net, seed, options)).problem());
  }
  for (int i = 0; i < 2; ++i) check(build_dsl_instance(generate_dsl(5, 10, 400 + i)));
  v.detail = fmt("%d Phase-1 steps on %d instances, min (decrease - %.3e) = %.3e, "
                 "final lambda <= %.4f",
                 steps, instances, drop, worst_margin, worst_lambda);
  if (steps == 0) v.detail += " (no steps needed)";
  return v;
}

Verdict criterion8() {
  Verdict v;
  const Network net = random_network(10, 8);
  const NumModel model = build_num_instance(net, generate_num(net, 8));
  const ProblemInstance& inst = model.problem();

  SolverConfig c;
  c.eps = 1e-8;
  const SolveResult ipld = solve(inst, c);

  const CpProblem cp = build_cp_num(model);
  std::vector<double> taus;
  for (int e = 0; e >= -8; --e) taus.push_back(std::pow(10.0, e));
  const CpResult base = cp_solve_grid(cp, taus);

  const double diff = rel_diff(ipld.objective, base.objective);
  const double step_product = base.tau * base.sigma * cp.norm_K * cp.norm_K;
  v.pass = ipld.converged() && base.converged && diff <= 1e-5 && ipld.feasibility <= 1e-7 &&
           base.feasibility <= 1e-7 && step_product <= 0.99 * (1 + 1e-12);
  v.detail = fmt("p=%lld, objectives %.10f vs %.10f (rel. diff %.1e), feasibility %.1e / %.1e, "
                 "tau=%.0e tau*sigma*||K||^2=%.4f, CP %d iterations",
                 static_cast<long long>(inst.total_dim()), ipld.objective, base.objective, diff,
                 ipld.feasibility, base.feasibility, base.tau, step_product, base.iterations);
  return v;
}

Verdict criterion9() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  int contained = 0;
  int pairs = 0;
  std::int64_t inside = 0;
  for (double a : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    for (double b : {0.05, 0.15, 0.25, 0.35, 0.45}) {
      const Lemma4Report r = lemma4_region_check(a, b, 0.005, 5.0);
      ++pairs;
      inside += r.points_in_region;
      if (r.contained) ++contained;
    }
  }
  const double elapsed = seconds_since(start);
  v.pass = contained == pairs && pairs == 25 && elapsed <= 10.0;
  v.detail = fmt("%d/%d (a, b) pairs contained, %lld grid points inside regions, %.2f s", contained,
                 pairs, static_cast<long long>(inside), elapsed);
  return v;
}

struct SweepCell {
  double value = 0.0;
  std::size_t iterations = 0;
  bool stopped = false;
};

Verdict criterion10() {
  const auto start = std::chrono::steady_clock::now();
  const ProblemInstance inst = build_dsl_instance(generate_dsl(7, 50, 3));
  const auto run = [&](double eps_master, double delta) {
    SolverConfig c;
    c.beta = 0.1;
    c.eps = 1e-12;
    c.eps_master = eps_master;
    c.delta = delta;
    c.enforce_tolerance_cap = false;
    c.practical_stop = PracticalStop{};
    const SolveResult r = solve(inst, c);
    return SweepCell{0.0, r.trace.size(), r.status == SolveStatus::kPracticalStop};
  };
  const auto sweep = [&](const std::vector<double>& values, bool eps_side) {
    std::vector<SweepCell> cells;
    for (double x : values) {
      SweepCell cell = eps_side ? run(x, 1e-5) : run(1e-5, x);
      cell.value = x;
      cells.push_back(cell);
    }
    return cells;
  };
  // Non-increasing up to +-2 iterations of run-to-run noise; stable below 1e-4.
  const auto judge = [](const std::vector<SweepCell>& cells, std::string& text) {
    bool ok = true;
    const std::size_t last = cells.back().iterations;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i].stopped) ok = false;
      if (i > 0 && cells[i].iterations > cells[i - 1].iterations + 2) ok = false;
      if (cells[i].value <= 1e-4 + 1e-18) {
        const long diff = static_cast<long>(cells[i].iterations) - static_cast<long>(last);
        if (std::abs(diff) > 2) ok = false;
      }
      text += fmt("%s%.0e:%zu", i ? " " : "", cells[i].value, cells[i].iterations);
    }
    return ok;
  };
  std::string eps_text;
  std::string delta_text;
  const bool eps_ok = judge(sweep({1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}, true), eps_text);
  const bool delta_ok = judge(sweep({1e-2, 1e-3, 1e-4, 1e-6, 1e-8}, false), delta_text);
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = eps_ok && delta_ok && elapsed <= 300.0;
  v.detail = fmt("eps_k sweep [%s]; delta_k sweep [%s]; %.0f s", eps_text.c_str(),
                 delta_text.c_str(), elapsed);
  return v;
}

// Reference values evaluated offline at 40 significant digits.
Verdict criterion11() {
  struct Item {
    const char* name;
    double got;
    double want;
  };
  const std::vector<Item> items = {
      {"sigma_rule(0.1,4)", sigma_rule(0.1, 4.0), 0.9857142857142857143},
      {"sigma_rule(0.05,10)", sigma_rule(0.05, 10.0), 0.9954363447105118365},
      {"sigma_rule(0.05,88)", sigma_rule(0.05, 88.0), 0.9984567624515530925},
      {"c_nu canonical beta=0.1 nu=4", c_nu(sigma_rule(0.1, 4.0), 1e-3, 4.0), 0.03},
      {"c_nu canonical beta=0.05 nu=10", c_nu(sigma_rule(0.05, 10.0), 5e-4, 10.0), 0.015},
      {"mt_coeff(1)", mt_coeff(1.0), 1.0},
      {"mt_coeff(0.25)", mt_coeff(0.25), 4.0},
      {"mt_coeff(0.5)", mt_coeff(0.5), 2.0},
      {"phase1_stepsize(1,0,0)", phase1_stepsize(1.0, 0.0, 0.0), 0.5},
      {"phase1_stepsize(0.2,0,0)", phase1_stepsize(0.2, 0.0, 0.0), 0.8333333333333333333},
      {"phase1_stepsize(0.5,1e-3,1e-3)", phase1_stepsize(0.5, 1e-3, 1e-3), 0.6637780757554914785},
      {"kmax(0.25,1e-6,sigma(0.1,4))",
       static_cast<double>(kmax_bound(0.25, 1e-6, sigma_rule(0.1, 4.0))), 863.0},
      {"kmax(0.25,1e-2/(1+sqrt 88),sigma(0.05,88))",
       static_cast<double>(kmax_bound(0.25, 1e-2 / (1.0 + std::sqrt(88.0)), sigma_rule(0.05, 88.0))),
       3599.0},
      {"jmax(0,0.05)", static_cast<double>(jmax_bound(0.0, 0.05)), 1.0},
      {"jmax(1,0.05)", static_cast<double>(jmax_bound(1.0, 0.05)), 879.0},
      {"jmax(3.7,0.1)", static_cast<double>(jmax_bound(3.7, 0.1)), 839.0},
      {"omega(0.97*0.05*(1-5e-4))", phase1_min_decrease(0.05), 0.001138307186118255742},
  };
  Verdict v;
  double worst = 0.0;
  std::string failed;
  for (const auto& item : items) {
    const double err = std::abs(item.got - item.want);
    worst = std::max(worst, err);
    if (err > 1e-12) {
      v.pass = false;
      failed += std::string(" ") + item.name;
    }
  }
  // The Phase-1 step reduces to the damped Newton step on a grid.
  for (double l = 1e-3; l < 100.0; l *= 1.1) {
    const double err = std::abs(phase1_stepsize(l, 0.0, 0.0) - 1.0 / (1.0 + l));
    worst = std::max(worst, err);
    if (err > 1e-12) v.pass = false;
  }
  v.detail = fmt("%zu reference values plus step-size grid, max abs error %.1e", items.size(), worst);
  if (!failed.empty()) v.detail += "; mismatched:" + failed;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"neighborhood invariant", criterion1},   {"iteration bound", criterion2},
      {"certificate bounds", criterion3},       {"oracle properties", criterion4},
      {"derivative consistency", criterion5},   {"exact-mode contraction", criterion6},
      {"phase-1 descent", criterion7},          {"cross-solver agreement", criterion8},
      {"lemma 4 containment", criterion9},      {"tolerance sweep", criterion10},
      {"scalar formula values", criterion11},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
