#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fixtures.hpp"
#include "ipld/io.hpp"
#include "ipld/master.hpp"
#include "ipld/rng.hpp"

using namespace ipld;

namespace {

Vec random_vec(Rng& rng, Eigen::Index n, double lo, double hi) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("composite prox is nonexpansive and Moreau-consistent") {
  Rng rng(21, "prop");
  for (int k = 0; k < 200; ++k) {
    const Vec lo = random_vec(rng, 4, -1.0, 0.0);
    const Vec hi = lo + random_vec(rng, 4, 0.0, 2.0);
    const CompositeTerm phi = CompositeTerm::box(lo, hi);
    const double gamma = rng.uniform(0.01, 3.0);
    const Vec a = random_vec(rng, 4, -3.0, 3.0);
    const Vec b = random_vec(rng, 4, -3.0, 3.0);
    const Vec pa = phi.prox(a, gamma);
    const Vec pb = phi.prox(b, gamma);
    CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
    // pa minimizes gamma phi*(-y) + ||y - a||^2 / 2 against nearby points.
    const double fa = gamma * phi.conjugate_value(pa) + 0.5 * (pa - a).squaredNorm();
    for (int j = 0; j < 5; ++j) {
      const Vec q = pa + random_vec(rng, 4, -0.1, 0.1);
      CHECK(fa <= gamma * phi.conjugate_value(q) + 0.5 * (q - a).squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("slave solutions are interior and meet their residual on random data") {
  const NumModel model = fixtures::small_num(7, 13);
  const ProblemInstance& inst = model.problem();
  Rng rng(4, "prop");
  for (int k = 0; k < 20; ++k) {
    const double t = std::exp(rng.uniform(std::log(1e-4), 0.0));
    const Vec y = random_vec(rng, inst.num_rows(), -1.0, 1.0);
    const double delta = std::exp(rng.uniform(std::log(1e-9), std::log(0.5)));
    const SlaveResult r = solve_slave(inst, t, y, delta);
    CHECK(r.interior);
    CHECK(r.residual <= delta / (1 + delta) * (1 + 1e-12));
  }
}

TEST_CASE("oracle Hessians are symmetric positive definite and master steps descend") {
  Rng rng(8, "prop");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NumModel model = fixtures::small_num(6 + int(seed), seed);
    const ProblemInstance& inst = model.problem();
    const double t = rng.uniform(0.01, 1.0);
    const Vec y = random_vec(rng, inst.num_rows(), -0.5, 0.5);
    const OracleEval e = build_oracle(inst, t, y, solve_slave(inst, t, y, 1e-8));
    CHECK((e.hess - e.hess.transpose()).norm() <= 1e-12 * e.hess.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(e.hess).eigenvalues().minCoeff() > 0.0);
    const MasterStepResult m = scaled_prox(e, inst.composite(), 1e-8);
    CHECK(model_value(e, inst.composite(), m.y_next) <= model_value(e, inst.composite(), y) + 1e-12);
  }
}

TEST_CASE("generators are deterministic per seed") {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const NumModel a = fixtures::small_num(8, seed);
    const NumModel b = fixtures::small_num(8, seed);
    CHECK(a.data.mu == b.data.mu);
    CHECK(a.data.upper == b.data.upper);
    CHECK(a.problem().coupling_matrix().toDense() == b.problem().coupling_matrix().toDense());
    const DslData c = generate_dsl(3, 5, seed);
    const DslData d = generate_dsl(3, 5, seed);
    CHECK(c.H[2] == d.H[2]);
  }
}

TEST_CASE("JSON round trip preserves random doubles exactly") {
  Rng rng(31, "prop");
  for (int k = 0; k < 200; ++k) {
    RunResult r;
    r.solver = "cp";
    r.problem = "dsl";
    r.status = "converged";
    r.objective = std::ldexp(rng.uniform(-1.0, 1.0), int(rng.below(200)) - 100);
    r.feasibility = rng.uniform();
    r.relative_gap = rng.uniform() * 1e-9;
    r.iterations = static_cast<long long>(rng.below(1000000));
    CHECK(result_from_json(result_to_json(r)) == r);
  }
}

TEST_CASE("path-following penalties decrease geometrically") {
  const ProblemInstance inst = fixtures::two_block_instance();
  SolverConfig c;
  c.kmax = 50;
  const SolveResult r = solve(inst, c);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].t < r.trace[k - 1].t);
    CHECK(r.trace[k].t == doctest::Approx(r.trace[k - 1].t_next).epsilon(1e-15));
  }
}
