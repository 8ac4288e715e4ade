#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ipld/oracle.hpp"
#include "ipld/rng.hpp"

using namespace ipld;
using fixtures::vec;

// Smoothed dual at t = 0.5, y = 0.1 for the scalar instance, evaluated
// offline at 40 digits.
constexpr double kD = -1.324295639212151219;
constexpr double kGrad = 0.9600510856100160609;
constexpr double kHess = 0.3984697135553903988;

TEST_CASE("scalar oracle matches reference values") {
  const ProblemInstance inst = fixtures::scalar_instance(0.3, CompositeTerm::box(vec({0.2}), vec({0.6})));
  const Vec y = vec({0.1});
  const OracleEval e = build_oracle(inst, 0.5, y, solve_slave(inst, 0.5, y, 1e-12));
  CHECK(e.dim() == 1);
  CHECK(e.d_value == doctest::Approx(kD).epsilon(1e-12));
  CHECK(e.grad[0] == doctest::Approx(kGrad).epsilon(1e-11));
  CHECK(e.hess(0, 0) == doctest::Approx(kHess).epsilon(1e-11));
  // D_t = d_t + phi*(-y) / t with phi*(-y) = -0.2 y for y > 0.
  CHECK(smoothed_dual_objective(inst, 0.5, y) == doctest::Approx(kD - 0.02 / 0.5).epsilon(1e-12));
  CHECK(dual_norm(e, vec({2.0}), NormSense::kPrimal) == doctest::Approx(2.0 * std::sqrt(kHess)));
  CHECK(dual_norm(e, vec({2.0}), NormSense::kDual) == doctest::Approx(2.0 / std::sqrt(kHess)));
}

TEST_CASE("Schur complement matches the matrix-free product") {
  const NumModel model = fixtures::small_num(9, 2);
  const ProblemInstance& inst = model.problem();
  const int n = inst.num_rows();
  const Vec y = Vec::Constant(n, 0.05);
  const double t = 0.1;
  const OracleEval e = build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-8));
  CHECK((e.hess - e.hess.transpose()).norm() <= 1e-12 * e.hess.norm());
  Rng rng(1, "test");
  for (int k = 0; k < 5; ++k) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.uniform(-1, 1);
    const Vec direct = e.hess * w;
    const Vec free = schur_apply(inst, t, e.x_tilde, w) / (t * t);
    CHECK((direct - free).norm() <= 1e-10 * direct.norm());
  }
  CHECK(e.grad.isApprox(inst.apply(e.x_tilde) / t));
}

TEST_CASE("oracle value, gradient and Hessian error bounds") {
  const ProblemInstance inst = fixtures::two_block_instance();
  const OracleErrorReport report =
      oracle_error_suite(inst, 0.3, vec({0.2, -0.1}), {0.3, 0.05, 1e-3});
  REQUIRE(report.entries.size() == 3);
  for (const auto& e : report.entries) {
    CHECK(e.measured_delta <= e.requested_delta);
    CHECK(e.value_ok);
    CHECK(e.sandwich_ok);
    CHECK(e.grad_ok);
  }
  CHECK(report.passed());
}

TEST_CASE("oracle gradient is the derivative of the oracle value") {
  const ProblemInstance inst = fixtures::two_block_instance();
  const double t = 0.4;
  const Vec y = vec({0.15, 0.05});
  const OracleEval e = build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-12));
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    Vec yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    const double dp = build_oracle(inst, t, yp, solve_slave(inst, t, yp, 1e-12)).d_value;
    const double dm = build_oracle(inst, t, ym, solve_slave(inst, t, ym, 1e-12)).d_value;
    CHECK((dp - dm) / (2 * h) == doctest::Approx(e.grad[j]).epsilon(1e-6));
  }
}
