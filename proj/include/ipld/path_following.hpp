#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ipld/master.hpp"
#include "ipld/oracle.hpp"
#include "ipld/problem.hpp"
#include "ipld/slave.hpp"

namespace ipld {

enum class ToleranceSchedule {
  kConstant,   ///< delta_k = delta, eps_k = eps_master
  kGeometric,  ///< delta_k = max(delta_min, factor * t_k), same for eps_k
};

/// Optional early exit on primal feasibility and relative duality gap.
struct PracticalStop {
  double feasibility_tol = 1e-5;
  double gap_tol = 1e-6;
};

struct SolverConfig {
  double t0 = 0.25;
  double beta = 0.05;
  double eps = 1e-3;         ///< target accuracy of the certified pair
  double delta = 1e-5;       ///< slave accuracy delta_k
  double eps_master = 1e-5;  ///< master accuracy eps_k
  ToleranceSchedule schedule = ToleranceSchedule::kConstant;
  double schedule_factor = 1e-3;
  double schedule_min = 1e-8;
  /// Tolerances are capped at beta / 100 unless this is false.
  bool enforce_tolerance_cap = true;
  std::int64_t kmax = 0;  ///< 0: derived bound + 1
  std::int64_t jmax = 2000;
  SlaveOptions slave;
  MasterOptions master;
  std::optional<PracticalStop> practical_stop;
  bool diagnostics = false;  ///< record neighborhood distances each iteration

  /// Throws ConfigError on invalid parameters.
  void validate() const;
  double delta_at(double t) const;
  double eps_at(double t) const;
};

/// Primal-dual certificate for the pair (x, y) at penalty t.
struct Certificate {
  double t = 0.0;
  double primal_opt = 0.0;    ///< ||A^T y - grad g(x)||^*_{x,t}
  double bound_primal = 0.0;  ///< (sqrt(nu) + delta / (1 + delta)) t
  double dual_resid_e = 0.0;  ///< ||e||^*_{y,t}, e = t hess (p - y)
  double dual_resid_r = 0.0;  ///< ||A^T r||^*_{x,t}, r = y - p
  double bound_dual = 0.0;    ///< t lambda
  bool interior = false;

  /// primal_opt, both dual residuals within eps and x interior.
  bool satisfies(double eps) const;
};

/// Certificate of (eval.x_tilde, eval.y) using prox point p.
Certificate certify(const ProblemInstance& instance, const OracleEval& eval,
                    const DualPoint& prox_point, double delta);

struct IterationRecord {
  int k = 0;
  double t = 0.0;       ///< t_k
  double t_next = 0.0;  ///< t_{k+1} = sigma t_k
  double lambda = 0.0;       ///< lambda_{t_k}(y^k)
  double lambda_step = 0.0;  ///< lambda_{t_{k+1}}(y^k)
  double delta_k = 0.0;
  double eps_k = 0.0;
  double slave_residual = 0.0;    ///< of x^{k+1} at (t_{k+1}, y^k)
  double monitor_residual = 0.0;  ///< of x_hat^k at (t_k, y^k)
  int slave_iters = 0;
  int inner_iters = 0;
  double model_gap_bound = 0.0;
  double delta_tilde_tk = -1.0;   ///< ||x^{k+1} - x_hat^k||_{x_hat^k, t_k}; -1 if not recorded
  double delta_tilde_tk1 = -1.0;  ///< same difference at (x^{k+1}, t_{k+1})
  Certificate certificate;
  double objective = 0.0;
  double feasibility = 0.0;
  double duality_gap = 0.0;
  double relative_gap = 0.0;
  double wall_ms = 0.0;
};

struct Phase1Step {
  int j = 0;
  double lambda_hat = 0.0;
  double alpha = 0.0;
  double eps_j = 0.0;
  double delta_j = 0.0;
  DualPoint y;  ///< iterate before the step
};

struct Phase1Result {
  DualPoint y0;
  PrimalPoint x0;
  double lambda = 0.0;  ///< accepted lambda_hat <= beta - eps
  double x0_residual = 0.0;
  int iterations = 0;
  std::vector<Phase1Step> steps;
};

/// Damped proximal-Newton initialization at t0 from y = 0 (or y_start).
Phase1Result phase1(const ProblemInstance& instance, const SolverConfig& config,
                    const std::optional<DualPoint>& y_start = std::nullopt);

enum class SolveStatus { kConverged, kPracticalStop, kIterationCap };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kIterationCap;
  PrimalPoint x;  ///< certified primal point x^{k+1}
  DualPoint y;    ///< certified dual point y^k
  Certificate certificate;
  Phase1Result phase1;
  std::vector<IterationRecord> trace;
  double sigma = 0.0;
  double eps_hat = 0.0;
  std::int64_t kmax = 0;
  double objective = 0.0;
  double feasibility = 0.0;
  double duality_gap = 0.0;
  double relative_gap = 0.0;
  double wall_ms = 0.0;

  bool converged() const { return status != SolveStatus::kIterationCap; }
};

SolveResult solve(const ProblemInstance& instance, const SolverConfig& config);

/// Primal objective, feasibility and an upper bound on the Lagrangian
/// duality gap of (x, y) for interior x: the dual function is bounded below by
/// minimizing the linearization of g(u) - y^T A u at x over the box K.
/// Infinite when that minimum is unbounded.
struct GapEstimate {
  double objective = 0.0;
  double feasibility = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
};

GapEstimate estimate_gap(const ProblemInstance& instance, const PrimalPoint& x, const DualPoint& y);

struct NeighborhoodCheck {
  int k = 0;
  bool in_neighborhood = false;  ///< lambda_{t_k}(y^k) <= beta
  bool step_bound = false;       ///< lambda_{t_{k+1}}(y^k) <= 2.1 beta
  bool distance_bound = false;   ///< both distances <= 0.4493 beta
  bool lemma3 = false;
  double lemma3_rhs = 0.0;
  bool lemma2 = false;
  double lemma2_lhs = 0.0;
  double lemma2_rhs = 0.0;
  bool lemma1_checked = false;  ///< needs the next iteration
  bool lemma1 = false;
  double lemma1_lhs = 0.0;
  double lemma1_rhs = 0.0;

  bool passed() const;
};

struct NeighborhoodReport {
  std::vector<NeighborhoodCheck> checks;
  bool passed() const;
};

/// Checks the per-iteration neighborhood inequalities on a trace recorded
/// with config.diagnostics = true.
NeighborhoodReport neighborhood_diagnostics(const std::vector<IterationRecord>& trace, double beta,
                                            double sigma, double nu);

/// Right-hand side of the one-step decrement recursion:
/// given delta (slave), delta_next (next monitor), lambda, eps, beta, sigma, nu.
double lemma1_bound(double delta, double delta_next, double lambda, double eps);

/// Coefficient multiplying lambda_t(y) in the penalty-update bound.
double lemma2_coefficient(double sigma, double delta_tilde_t);

}  // namespace ipld
