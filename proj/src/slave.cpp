#include "ipld/slave.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ipld/errors.hpp"
#include "parallel.hpp"

namespace ipld {

int SlaveResult::total_newton_iters() const {
  return std::accumulate(newton_iters.begin(), newton_iters.end(), 0);
}

namespace {

struct BlockOutcome {
  Vec x;
  double residual = 0.0;
  int iters = 0;
  int nonmonotone = 0;
  bool converged = false;
  Eigen::LLT<Mat> factor;  // Hessian factor at the returned point
};

BlockOutcome newton_block(const Block& block, double t, const Vec& y, Vec x, double target,
                          int max_iters) {
  BlockOutcome out;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const BlockPsi psi = evaluate_block_psi(block, t, x, y, false);
    Eigen::LLT<Mat> llt = factorize_spd(psi.hessian, "slave Hessian");
    const Vec step = llt.solve(psi.gradient);
    const double lambda = std::sqrt(std::max(0.0, psi.gradient.dot(step)));
    if (it > 1 && lambda > previous) ++out.nonmonotone;
    previous = lambda;
    out.residual = lambda;
    out.iters = it;
    if (lambda <= target) {
      out.converged = true;
      out.factor = std::move(llt);
      break;
    }
    if (it == max_iters) break;

    double alpha = 1.0 / (1.0 + lambda);
    Vec next = x - alpha * step;
    // Roundoff guard; the damped step stays interior in exact arithmetic.
    while (!block.barrier.contains(next) || !block.smooth->in_domain(next)) {
      alpha *= 0.5;
      if (alpha < 1e-20) throw DomainError("slave: damped Newton step left the interior");
      next = x - alpha * step;
    }
    x = std::move(next);
  }
  out.x = std::move(x);
  return out;
}

SlaveResult run_slave(const ProblemInstance& instance, double t, const DualPoint& y, double delta,
                      PrimalPoint start, const SlaveOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("slave: delta must lie in (0, 1)");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("slave: t must lie in (0, 1]");
  if (y.size() != instance.num_rows()) throw ConfigError("slave: dual dimension mismatch");
  if (!instance.is_interior(start)) throw DomainError("slave: starting point is not interior");

  const int nb = instance.num_blocks();
  // Blocks are orthogonal in the psi metric, so per-block targets of
  // delta / ((1 + delta) sqrt(N)) bound the aggregate residual.
  const double target = delta / ((1.0 + delta) * std::sqrt(static_cast<double>(nb)));

  std::vector<BlockOutcome> outcomes(static_cast<std::size_t>(nb));
  detail::parallel_for_each_block(nb, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    outcomes[k] = newton_block(instance.block(i), t, y, std::move(start.blocks[k]), target,
                               options.max_iters);
  });

  SlaveResult result;
  result.t = t;
  result.delta = delta;
  result.x.blocks.reserve(outcomes.size());
  double sum_sq = 0.0;
  int failed = -1;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    BlockOutcome& o = outcomes[i];
    sum_sq += o.residual * o.residual;
    result.block_residuals.push_back(o.residual);
    result.newton_iters.push_back(o.iters);
    result.nonmonotone_steps += o.nonmonotone;
    result.x.blocks.push_back(std::move(o.x));
    result.block_factors.push_back(std::move(o.factor));
    if (!o.converged && failed < 0) failed = static_cast<int>(i);
  }
  result.residual = std::sqrt(sum_sq);
  result.interior = instance.is_interior(result.x);
  if (failed >= 0) {
    std::ostringstream msg;
    msg << "slave: block " << failed << " did not reach residual " << target << " within "
        << options.max_iters << " Newton steps (last " << outcomes[std::size_t(failed)].residual
        << ")";
    throw ConvergenceError(msg.str(), result.residual);
  }
  return result;
}

}  // namespace

SlaveResult solve_slave(const ProblemInstance& instance, double t, const DualPoint& y, double delta,
                        const SlaveOptions& options) {
  return run_slave(instance, t, y, delta, instance.center(), options);
}

SlaveResult solve_slave(const ProblemInstance& instance, double t, const DualPoint& y, double delta,
                        const PrimalPoint& warm_start, const SlaveOptions& options) {
  return run_slave(instance, t, y, delta, warm_start, options);
}

double local_distance(const ProblemInstance& instance, double t, const PrimalPoint& anchor,
                      const PrimalPoint& other) {
  const double scale = mt_coeff(t);
  double sum_sq = 0.0;
  for (int i = 0; i < instance.num_blocks(); ++i) {
    const Block& b = instance.block(i);
    const auto k = static_cast<std::size_t>(i);
    Mat h = scale * b.smooth->hessian(anchor.blocks[k]);
    h.diagonal() += b.barrier.hessian_diag(anchor.blocks[k]);
    const Vec diff = other.blocks[k] - anchor.blocks[k];
    sum_sq += diff.dot(h * diff);
  }
  return std::sqrt(std::max(0.0, sum_sq));
}

bool verify_delta_bound(const ProblemInstance& instance, double t, const SlaveResult& result,
                        const PrimalPoint& x_exact) {
  return local_distance(instance, t, result.x, x_exact) <= result.delta;
}

}  // namespace ipld
