#pragma once

#include <vector>

#include "ipld/problem.hpp"
#include "ipld/slave.hpp"

namespace ipld {

/// Inexact oracle of the smoothed dual d_t at y, built from a slave solution:
///   value   = -psi_t(x_tilde; y)
///   grad    = (1/t) A x_tilde
///   hess    = (1/t^2) A (grad^2 psi_t(x_tilde))^{-1} A^T
/// Immutable after construction.
struct OracleEval {
  double t = 0.0;
  DualPoint y;
  PrimalPoint x_tilde;
  double delta_used = 0.0;
  double slave_residual = 0.0;
  double d_value = 0.0;
  Vec grad;
  Mat hess;
  Eigen::LLT<Mat> factor;                     ///< Cholesky of hess
  std::vector<Eigen::LLT<Mat>> block_factors;  ///< Cholesky of grad^2 psi_t per block

  int dim() const { return static_cast<int>(grad.size()); }
};

OracleEval build_oracle(const ProblemInstance& instance, double t, const DualPoint& y,
                        SlaveResult slave);

enum class NormSense {
  kPrimal,  ///< (u^T hess u)^{1/2}
  kDual,    ///< (v^T hess^{-1} v)^{1/2}
};

double dual_norm(const OracleEval& eval, const Vec& u, NormSense sense);

/// A (grad^2 psi_t(x))^{-1} A^T w evaluated blockwise without forming the
/// Schur complement.
Vec schur_apply(const ProblemInstance& instance, double t, const PrimalPoint& x, const Vec& w);

/// Exact smoothed dual objective D_t(y) = d_t(y) + (1/t) phi*(-y), with d_t
/// evaluated through a reference slave solve at accuracy delta_ref.
double smoothed_dual_objective(const ProblemInstance& instance, double t, const DualPoint& y,
                               double delta_ref = 1e-12);

struct OracleErrorEntry {
  double requested_delta = 0.0;
  double measured_delta = 0.0;  ///< ||x_tilde - x_ref||_{x_tilde, t}
  double value_gap = 0.0;       ///< d_t - d_tilde_t
  double value_lower = 0.0;     ///< omega(dm / (1 + dm))
  double value_upper = 0.0;     ///< omega_*(dm / (1 - dm))
  double value_slack = 0.0;     ///< floating-point rounding allowance
  bool value_ok = false;
  double eig_min = 0.0;  ///< generalized eigenvalues of (hess_exact, hess_tilde)
  double eig_max = 0.0;
  bool sandwich_ok = false;
  double grad_error = 0.0;  ///< ||grad_tilde - grad||^*_{y,t}
  bool grad_ok = false;

  bool passed() const { return value_ok && sandwich_ok && grad_ok; }
};

struct OracleErrorReport {
  std::vector<OracleErrorEntry> entries;
  bool passed() const;
};

/// Compares inexact oracles at each requested delta against a reference
/// oracle at delta_ref, using the measured distance of each slave solution.
OracleErrorReport oracle_error_suite(const ProblemInstance& instance, double t,
                                     const DualPoint& y, const std::vector<double>& deltas,
                                     double delta_ref = 1e-12);

}  // namespace ipld
