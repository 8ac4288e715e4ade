#pragma once

#include <vector>

#include "ipld/problem.hpp"

namespace ipld {

struct SlaveOptions {
  int max_iters = 200;  ///< per block
};

/// delta-approximate minimizer of psi_t(.; y) over int K.
struct SlaveResult {
  PrimalPoint x;
  double t = 0.0;
  double delta = 0.0;                  ///< requested accuracy
  std::vector<double> block_residuals;  ///< ||grad psi_i||^*_{x_i,t}
  double residual = 0.0;               ///< root-sum-of-squares of block residuals
  std::vector<int> newton_iters;
  int nonmonotone_steps = 0;  ///< residual increases after the first step
  bool interior = false;
  /// Cholesky factors of grad^2 psi_t at x, one per block (reused by the oracle).
  std::vector<Eigen::LLT<Mat>> block_factors;

  int total_newton_iters() const;
};

/// Damped Newton x+ = x - H^{-1} grad / (1 + lambda) per block until the
/// aggregate dual local norm of grad psi_t is at most delta / (1 + delta).
/// Starts at the barrier centers.
SlaveResult solve_slave(const ProblemInstance& instance, double t, const DualPoint& y, double delta,
                        const SlaveOptions& options = {});

/// Same, warm-started at `warm_start` (must be interior).
SlaveResult solve_slave(const ProblemInstance& instance, double t, const DualPoint& y, double delta,
                        const PrimalPoint& warm_start, const SlaveOptions& options = {});

/// ||other - anchor||_{anchor, t} in the block-diagonal psi_t metric.
double local_distance(const ProblemInstance& instance, double t, const PrimalPoint& anchor,
                      const PrimalPoint& other);

/// True iff ||x_tilde - x_exact||_{x_tilde, t} <= delta, i.e. the slave result
/// is a delta-solution given a high-accuracy reference.
bool verify_delta_bound(const ProblemInstance& instance, double t, const SlaveResult& result,
                        const PrimalPoint& x_exact);

}  // namespace ipld
