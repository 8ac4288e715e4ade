#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ipld/errors.hpp"
#include "ipld/path_following.hpp"

using namespace ipld;
using fixtures::vec;

TEST_CASE("config validation and tolerance schedules") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  SolverConfig bad = c;
  bad.t0 = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.beta = 0.2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.delta = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.jmax = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  // Tolerances above beta / 100 are capped unless the cap is disabled.
  c.delta = 1e-2;
  c.eps_master = 1e-1;
  CHECK(c.delta_at(0.1) == doctest::Approx(c.beta / 100));
  CHECK(c.eps_at(0.1) == doctest::Approx(c.beta / 100));
  c.enforce_tolerance_cap = false;
  CHECK(c.delta_at(0.1) == 1e-2);
  CHECK(c.eps_at(0.1) == 1e-1);

  SolverConfig g;
  g.schedule = ToleranceSchedule::kGeometric;
  g.schedule_factor = 1e-3;
  g.schedule_min = 1e-8;
  CHECK(g.delta_at(0.1) == doctest::Approx(1e-4));
  CHECK(g.eps_at(1e-7) == doctest::Approx(1e-8));
}

TEST_CASE("decrement recursion helpers") {
  for (double l : {0.01, 0.05, 0.2}) {
    CHECK(lemma1_bound(0.0, 0.0, l, 0.0) == doctest::Approx(l * l / ((1 - l) * (1 - l))));
  }
  CHECK(std::abs(lemma1_bound(1e-4, 2e-4, 0.1, 1e-3) - 0.01852412773144272558) < 1e-14);
  CHECK(lemma1_bound(0.5, 0.0, 0.6, 0.0) == INFINITY);
  CHECK(lemma2_coefficient(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(std::abs(lemma2_coefficient(0.99, 0.02) - 1.337182877858057080) < 1e-14);
}

TEST_CASE("phase 1 reaches the neighborhood with guaranteed descent") {
  const ProblemInstance inst = fixtures::two_block_instance();
  SolverConfig c;
  const Phase1Result p = phase1(inst, c);
  CHECK(p.lambda <= c.beta);
  CHECK(p.iterations == static_cast<int>(p.steps.size()));
  CHECK(inst.is_interior(p.x0));
  const double drop = phase1_min_decrease(c.beta);
  for (std::size_t j = 0; j < p.steps.size(); ++j) {
    const DualPoint& next = j + 1 < p.steps.size() ? p.steps[j + 1].y : p.y0;
    const double before = smoothed_dual_objective(inst, c.t0, p.steps[j].y);
    const double after = smoothed_dual_objective(inst, c.t0, next);
    CHECK(before - after >= drop - 1e-8);
    CHECK(p.steps[j].alpha > 0.0);
    CHECK(p.steps[j].alpha < 1.0);
  }
  SolverConfig capped = c;
  capped.jmax = 1;
  const NumModel far = fixtures::small_num(10, 9);
  CHECK_THROWS_AS(phase1(far.problem(), capped, Vec::Constant(far.problem().num_rows(), -30.0)),
                  ConvergenceError);
}

TEST_CASE("main loop on a small coupled instance") {
  const ProblemInstance inst = fixtures::two_block_instance();
  SolverConfig c;
  c.eps = 1e-3;
  c.diagnostics = true;
  const SolveResult r = solve(inst, c);
  CHECK(r.status == SolveStatus::kConverged);
  CHECK(r.converged());
  CHECK(r.sigma == doctest::Approx(sigma_rule(c.beta, inst.nu())));
  CHECK(r.eps_hat == doctest::Approx(c.eps / (1 + std::sqrt(inst.nu()))));
  CHECK(static_cast<std::int64_t>(r.trace.size()) <= kmax_bound(c.t0, r.eps_hat, r.sigma) + 1);
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    const IterationRecord& it = r.trace[k];
    CHECK(it.k == static_cast<int>(k));
    CHECK(it.t == doctest::Approx(c.t0 * std::pow(r.sigma, double(k))).epsilon(1e-12));
    CHECK(it.lambda <= c.beta);
    CHECK(it.certificate.primal_opt <= it.certificate.bound_primal * (1 + 1e-12));
    CHECK(it.certificate.dual_resid_e == doctest::Approx(it.certificate.bound_dual).epsilon(1e-10));
    CHECK(it.certificate.dual_resid_r == doctest::Approx(it.certificate.bound_dual).epsilon(1e-10));
  }
  CHECK(r.certificate.satisfies(c.eps));
  CHECK(inst.is_interior(r.x));
  CHECK(neighborhood_diagnostics(r.trace, c.beta, r.sigma, inst.nu()).passed());
  CHECK(r.feasibility <= 1e-2);

  // A tighter run agrees on the objective.
  SolverConfig tight = c;
  tight.eps = 1e-5;
  tight.diagnostics = false;
  const SolveResult rt = solve(inst, tight);
  CHECK(std::abs(rt.objective - r.objective) <= 1e-2 * std::max(1.0, std::abs(rt.objective)));
  CHECK(rt.trace.size() > r.trace.size());
}

TEST_CASE("practical stop and iteration cap") {
  const ProblemInstance inst = fixtures::two_block_instance();
  SolverConfig c;
  c.eps = 1e-8;
  c.practical_stop = PracticalStop{1e-4, 1e-4};
  const SolveResult r = solve(inst, c);
  CHECK(r.status == SolveStatus::kPracticalStop);
  CHECK(r.feasibility <= 1e-4);
  CHECK(r.relative_gap <= 1e-4);
  CHECK(to_string(r.status) == "practical_stop");

  SolverConfig capped;
  capped.kmax = 5;
  const SolveResult rc = solve(inst, capped);
  CHECK(rc.status == SolveStatus::kIterationCap);
  CHECK(rc.trace.size() == 5);
  CHECK_FALSE(rc.converged());
}

TEST_CASE("gap estimate") {
  const ProblemInstance inst = fixtures::two_block_instance();
  SolverConfig c;
  c.eps = 1e-6;
  const SolveResult r = solve(inst, c);
  const GapEstimate g = estimate_gap(inst, r.x, r.y);
  CHECK(g.objective == doctest::Approx(inst.smooth_value(r.x)));
  CHECK(g.feasibility == doctest::Approx(inst.composite().violation(inst.apply(r.x))));
  CHECK(g.gap >= -1e-12);
  CHECK(g.relative_gap <= 1e-4);
}
