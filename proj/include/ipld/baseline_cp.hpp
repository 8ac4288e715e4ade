#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "ipld/applications.hpp"
#include "ipld/problem.hpp"

namespace ipld {

/// min_u G(u) + F(K u) in the form used by the first-order primal-dual
/// baseline. G and F* enter only through their proximal maps.
struct CpProblem {
  Eigen::SparseMatrix<double> K;
  std::function<Vec(const Vec& v, double tau)> prox_g;
  std::function<Vec(const Vec& v, double sigma)> prox_fstar;
  /// Primal objective at u (constraint violations measured separately).
  std::function<double(const Vec& u)> primal_objective;
  /// Dual objective -G*(-K^T s) - F*(s); may be unset.
  std::function<double(const Vec& s)> dual_objective;
  std::function<double(const Vec& u)> feasibility;
  Vec u0;
  Vec s0;
  double norm_K = 0.0;  ///< upper estimate of ||K||
};

/// Power iteration on K^T K until the estimate stagnates to `rel_tol`,
/// then inflated by `inflation`.
double estimate_operator_norm(const Eigen::SparseMatrix<double>& K, double rel_tol = 1e-8,
                              double inflation = 1.01);

struct CpOptions {
  double tau = 1e-6;
  int max_iter = 20000;
  double tol_feas = 1e-7;
  double tol_gap = 1e-7;
  int check_every = 1;
};

struct CpHistoryEntry {
  int k = 0;
  double objective = 0.0;
  double feasibility = 0.0;
  double relative_gap = 0.0;
  bool gap_from_stagnation = false;
};

struct CpResult {
  Vec u;
  Vec s;
  int iterations = 0;
  bool converged = false;
  double tau = 0.0;
  double sigma = 0.0;
  double objective = 0.0;
  double feasibility = 0.0;
  double relative_gap = 0.0;
  /// True when no dual objective was available and the relative iterate
  /// change stood in for the gap.
  bool gap_from_stagnation = false;
  double wall_ms = 0.0;
  std::vector<CpHistoryEntry> history;
};

/// Primal-dual iteration with over-relaxation 1 and sigma = 0.99 / (tau ||K||^2).
/// Hitting max_iter returns converged = false.
CpResult cp_solve(const CpProblem& problem, const CpOptions& options = {});

/// Runs each tau and returns the converged run with the fewest iterations
/// (or the run with the smallest feasibility violation if none converged).
CpResult cp_solve_grid(const CpProblem& problem, const std::vector<double>& taus,
                       CpOptions options = {});

/// NUM in CP form with u = (x, z), z_i = d_i^T x_i + mu_i:
///   G(x, z) = (rho/2)||x - r||^2 + indicator_[0,M](x) - sum ln z_i
///   K u = (D x - z, A x),  F = indicator_{-mu} x indicator_[L,U].
CpProblem build_cp_num(const NumModel& model);

/// Splits a CP primal vector back into NUM blocks.
PrimalPoint num_cp_primal(const NumModel& model, const Vec& u);

}  // namespace ipld
