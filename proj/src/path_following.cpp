#include "ipld/path_following.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ipld/errors.hpp"
#include "ipld/scalar.hpp"

namespace ipld {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double schedule_value(const SolverConfig& c, double base, double t) {
  double v = c.schedule == ToleranceSchedule::kConstant
                 ? base
                 : std::max(c.schedule_min, c.schedule_factor * t);
  if (c.enforce_tolerance_cap) v = std::min(v, c.beta / 100.0);
  return v;
}

// Distance bound implied by a gradient residual r (r < 1).
double residual_distance(double r) { return r / (1.0 - r); }

}  // namespace

void SolverConfig::validate() const {
  if (!(t0 > 0.0 && t0 <= 1.0)) throw ConfigError("config: t0 must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 0.1)) throw ConfigError("config: beta must lie in (0, 0.1]");
  if (!(eps > 0.0)) throw ConfigError("config: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("config: delta must lie in (0, 1)");
  if (!(eps_master > 0.0)) throw ConfigError("config: eps_master must be positive");
  if (schedule == ToleranceSchedule::kGeometric &&
      !(schedule_factor > 0.0 && schedule_min > 0.0 && schedule_min < 1.0)) {
    throw ConfigError("config: geometric schedule needs positive factor and minimum");
  }
  if (kmax < 0) throw ConfigError("config: kmax must be >= 0");
  if (jmax < 1) throw ConfigError("config: jmax must be >= 1");
  if (slave.max_iters < 1 || master.max_inner < 1) {
    throw ConfigError("config: iteration caps must be positive");
  }
  if (practical_stop && !(practical_stop->feasibility_tol > 0.0 && practical_stop->gap_tol > 0.0)) {
    throw ConfigError("config: practical stop tolerances must be positive");
  }
}

double SolverConfig::delta_at(double t) const { return schedule_value(*this, delta, t); }
double SolverConfig::eps_at(double t) const { return schedule_value(*this, eps_master, t); }

// ---------------------------------------------------------------------------
// Certificates and gap

bool Certificate::satisfies(double tol) const {
  return interior && primal_opt <= tol && dual_resid_e <= tol && dual_resid_r <= tol;
}

Certificate certify(const ProblemInstance& instance, const OracleEval& eval,
                    const DualPoint& prox_point, double delta) {
  Certificate c;
  c.t = eval.t;
  c.interior = instance.is_interior(eval.x_tilde);
  const Vec diff = prox_point - eval.y;
  const double lambda = dual_norm(eval, diff, NormSense::kPrimal);
  c.bound_dual = eval.t * lambda;
  c.bound_primal = (std::sqrt(instance.nu()) + delta / (1.0 + delta)) * eval.t;

  const Vec e = eval.t * (eval.hess * diff);
  c.dual_resid_e = dual_norm(eval, e, NormSense::kDual);

  // Both primal norms use the block factors of grad^2 psi_t at x_tilde.
  const Vec r = eval.y - prox_point;
  double opt_sq = 0.0;
  double resid_sq = 0.0;
  for (int i = 0; i < instance.num_blocks(); ++i) {
    const auto slot = static_cast<std::size_t>(i);
    const Block& block = instance.block(i);
    const Eigen::LLT<Mat>& factor = eval.block_factors[slot];
    const Vec& xi = eval.x_tilde.blocks[slot];
    const Vec v = instance.apply_transpose(i, eval.y) - block.smooth->gradient(xi);
    const double a = primal_dual_norm(factor, v);
    const double b = primal_dual_norm(factor, instance.apply_transpose(i, r));
    opt_sq += a * a;
    resid_sq += b * b;
  }
  c.primal_opt = std::sqrt(opt_sq);
  c.dual_resid_r = std::sqrt(resid_sq);
  return c;
}

GapEstimate estimate_gap(const ProblemInstance& instance, const PrimalPoint& x,
                         const DualPoint& y) {
  GapEstimate out;
  out.objective = instance.smooth_value(x);
  const Vec ax = instance.apply(x);
  out.feasibility = instance.composite().violation(ax);
  // By convexity min_{u in K} [g(u) - y^T A u] >= g(x) - y^T A x + min_{u in K} G^T (u - x)
  // with G = grad g(x) - A^T y; the box minimum is taken coordinatewise.
  double linear_min = 0.0;
  for (int i = 0; i < instance.num_blocks(); ++i) {
    const auto slot = static_cast<std::size_t>(i);
    const Block& block = instance.block(i);
    const Vec& xi = x.blocks[slot];
    const Vec G = block.smooth->gradient(xi) - instance.apply_transpose(i, y);
    for (Eigen::Index j = 0; j < xi.size(); ++j) {
      if (G[j] == 0.0) continue;
      const double end = G[j] > 0.0 ? block.barrier.lower()[j] : block.barrier.upper()[j];
      linear_min += G[j] * (end - xi[j]);
    }
  }
  out.gap = y.dot(ax) + instance.composite().conjugate_value(y) - linear_min;
  out.relative_gap = out.gap / std::max(1.0, std::abs(out.objective));
  return out;
}

// ---------------------------------------------------------------------------
// Phase 1

Phase1Result phase1(const ProblemInstance& instance, const SolverConfig& config,
                    const std::optional<DualPoint>& y_start) {
  config.validate();
  const CompositeTerm& phi = instance.composite();
  const double t0 = config.t0;
  DualPoint y = y_start ? *y_start : DualPoint(Vec::Zero(instance.num_rows()));
  if (y.size() != instance.num_rows()) throw ConfigError("phase1: start point has wrong size");
  PrimalPoint warm = instance.center();

  Phase1Result out;
  for (std::int64_t j = 0; j < config.jmax; ++j) {
    const double delta_j = config.delta_at(t0);
    const double eps_j = config.eps_at(t0);
    SlaveResult slave = solve_slave(instance, t0, y, delta_j, warm, config.slave);
    warm = slave.x;
    const double residual = slave.residual;
    const OracleEval eval = build_oracle(instance, t0, y, std::move(slave));
    MasterStepResult step = scaled_prox(eval, phi, eps_j, config.master);
    double lambda_hat = step.lambda;

    auto accept = [&](double lambda, double resid) {
      out.y0 = y;
      out.x0 = warm;
      out.lambda = lambda;
      out.x0_residual = resid;
      out.iterations = static_cast<int>(j);
      return out;
    };
    if (lambda_hat <= config.beta - eps_j) return accept(lambda_hat, residual);

    if (lambda_hat <= eps_j + delta_j) {
      // Step-size formula undefined here; re-measure with tighter tolerances.
      SlaveResult tight = solve_slave(instance, t0, y, delta_j / 10.0, warm, config.slave);
      warm = tight.x;
      const double tight_resid = tight.residual;
      const OracleEval tight_eval = build_oracle(instance, t0, y, std::move(tight));
      const MasterStepResult tight_step = scaled_prox(tight_eval, phi, eps_j / 10.0, config.master);
      if (tight_step.lambda <= config.beta - eps_j / 10.0) {
        return accept(tight_step.lambda, tight_resid);
      }
      throw ConvergenceError("phase1: decrement below eps + delta but above beta",
                             tight_step.lambda);
    }

    Phase1Step record;
    record.j = static_cast<int>(j);
    record.lambda_hat = lambda_hat;
    record.alpha = phase1_stepsize(lambda_hat, eps_j, delta_j);
    record.eps_j = eps_j;
    record.delta_j = delta_j;
    record.y = y;
    y = (1.0 - record.alpha) * y + record.alpha * step.y_next;
    out.steps.push_back(std::move(record));
  }
  const double last = out.steps.empty() ? 0.0 : out.steps.back().lambda_hat;
  throw ConvergenceError("phase1: iteration cap reached", last);
}

// ---------------------------------------------------------------------------
// Main loop

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kPracticalStop:
      return "practical_stop";
    case SolveStatus::kIterationCap:
      return "iteration_cap";
  }
  return "unknown";
}

SolveResult solve(const ProblemInstance& instance, const SolverConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const CompositeTerm& phi = instance.composite();
  const double nu = instance.nu();
  const double sqrt_nu = std::sqrt(nu);

  SolveResult result;
  result.sigma = sigma_rule(config.beta, nu);
  result.eps_hat = config.eps / (1.0 + sqrt_nu);
  if (config.kmax > 0) {
    result.kmax = config.kmax;
  } else {
    const std::int64_t bound =
        result.eps_hat < config.t0 ? kmax_bound(config.t0, result.eps_hat, result.sigma) : 0;
    result.kmax = bound + 1;
  }

  result.phase1 = phase1(instance, config);
  double t = config.t0;
  DualPoint y = result.phase1.y0;
  PrimalPoint x_hat = result.phase1.x0;
  double lambda = result.phase1.lambda;
  double monitor_residual = result.phase1.x0_residual;

  for (std::int64_t k = 0;; ++k) {
    const auto iter_start = Clock::now();
    const double delta_k = config.delta_at(t);
    const double eps_k = config.eps_at(t);
    IterationRecord rec;
    rec.k = static_cast<int>(k);
    rec.t = t;
    rec.delta_k = delta_k;
    rec.eps_k = eps_k;

    if (k > 0) {
      // lambda_{t_k}(y^k) through an extra slave solve at (t_k, y^k).
      SlaveResult monitor = solve_slave(instance, t, y, delta_k, result.x, config.slave);
      monitor_residual = monitor.residual;
      x_hat = monitor.x;
      const OracleEval eval = build_oracle(instance, t, y, std::move(monitor));
      lambda = gradient_mapping(eval, phi, eps_k / 10.0, config.master).lambda_primal;
    }
    rec.lambda = lambda;
    rec.monitor_residual = monitor_residual;

    const double t_next = result.sigma * t;
    rec.t_next = t_next;
    SlaveResult slave = solve_slave(instance, t_next, y, delta_k, x_hat, config.slave);
    rec.slave_residual = slave.residual;
    rec.slave_iters = slave.total_newton_iters();
    const OracleEval eval = build_oracle(instance, t_next, y, std::move(slave));
    MasterStepResult step = scaled_prox(eval, phi, eps_k, config.master);
    rec.lambda_step = step.lambda;
    rec.inner_iters = step.inner_iters;
    rec.model_gap_bound = step.model_gap_bound;
    rec.certificate = certify(instance, eval, step.y_next, delta_k);

    const GapEstimate gap = estimate_gap(instance, eval.x_tilde, y);
    rec.objective = gap.objective;
    rec.feasibility = gap.feasibility;
    rec.duality_gap = gap.gap;
    rec.relative_gap = gap.relative_gap;
    if (config.diagnostics) {
      rec.delta_tilde_tk = local_distance(instance, t, x_hat, eval.x_tilde);
      rec.delta_tilde_tk1 = local_distance(instance, t_next, eval.x_tilde, x_hat);
    }
    rec.wall_ms = elapsed_ms(iter_start);

    result.x = eval.x_tilde;
    result.y = y;
    result.certificate = rec.certificate;
    result.objective = gap.objective;
    result.feasibility = gap.feasibility;
    result.duality_gap = gap.gap;
    result.relative_gap = gap.relative_gap;
    result.trace.push_back(std::move(rec));

    if (t_next * (sqrt_nu + 1.0) <= config.eps) {
      result.status = SolveStatus::kConverged;
      break;
    }
    if (config.practical_stop && gap.feasibility <= config.practical_stop->feasibility_tol &&
        gap.relative_gap <= config.practical_stop->gap_tol) {
      result.status = SolveStatus::kPracticalStop;
      break;
    }
    if (k + 1 >= result.kmax) {
      result.status = SolveStatus::kIterationCap;
      break;
    }
    t = t_next;
    y = std::move(step.y_next);
  }
  result.wall_ms = elapsed_ms(start);
  return result;
}

// ---------------------------------------------------------------------------
// Neighborhood diagnostics

double lemma1_bound(double delta, double delta_next, double lambda, double eps) {
  const double le = lambda + eps;
  const double denom = 1.0 - lambda - delta - eps;
  if (!(denom > 0.0 && delta_next < 1.0)) return std::numeric_limits<double>::infinity();
  const double inner = 3.0 * eps + delta + std::sqrt(std::max(0.0, 4.0 * delta - 2.0 * delta * delta)) * le +
                       le * le / denom;
  return delta_next + inner / ((1.0 - delta_next) * denom);
}

double lemma2_coefficient(double sigma, double delta_tilde_t) {
  const double s = 1.0 - delta_tilde_t;
  return (1.0 + std::sqrt(1.0 - 2.0 * sigma * s * s + sigma)) / (sigma * s);
}

bool NeighborhoodCheck::passed() const {
  return in_neighborhood && step_bound && distance_bound && lemma3 && lemma2 &&
         (!lemma1_checked || lemma1);
}

bool NeighborhoodReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

NeighborhoodReport neighborhood_diagnostics(const std::vector<IterationRecord>& trace, double beta,
                                            double sigma, double nu) {
  // Measured decrements come from inexact prox points; each is within eps
  // of the exact-prox decrement, which the slack terms below account for.
  constexpr double kRound = 1e-9;
  NeighborhoodReport report;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const IterationRecord& r = trace[i];
    if (r.delta_tilde_tk < 0.0) throw ConfigError("diagnostics: trace lacks distance records");
    NeighborhoodCheck c;
    c.k = r.k;
    c.in_neighborhood = r.lambda <= beta;
    c.step_bound = r.lambda_step <= 2.1 * beta;
    const double dmax = std::max(r.delta_tilde_tk, r.delta_tilde_tk1);
    c.distance_bound = dmax <= 0.4493 * beta;

    const double dhat = std::max(r.monitor_residual, r.slave_residual);
    const double cn = c_nu(sigma, dhat, nu);
    c.lemma3_rhs = dhat + cn < 1.0 ? (dhat + cn) / (1.0 - dhat - cn)
                                   : std::numeric_limits<double>::infinity();
    c.lemma3 = dmax <= c.lemma3_rhs + kRound;

    c.lemma2_lhs = r.lambda_step - r.eps_k;
    c.lemma2_rhs = r.delta_tilde_tk1 +
                   lemma2_coefficient(sigma, r.delta_tilde_tk) * (r.lambda + r.eps_k / 10.0);
    c.lemma2 = c.lemma2_lhs <= c.lemma2_rhs + kRound;

    if (i + 1 < trace.size()) {
      const IterationRecord& next = trace[i + 1];
      c.lemma1_checked = true;
      c.lemma1_lhs = next.lambda - next.eps_k / 10.0;
      c.lemma1_rhs = lemma1_bound(residual_distance(r.slave_residual),
                                  residual_distance(next.monitor_residual),
                                  r.lambda_step + r.eps_k, r.eps_k);
      c.lemma1 = c.lemma1_lhs <= c.lemma1_rhs + kRound;
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace ipld
