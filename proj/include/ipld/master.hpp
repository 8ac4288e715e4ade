#pragma once

#include "ipld/oracle.hpp"
#include "ipld/problem.hpp"

namespace ipld {

struct MasterOptions {
  int max_inner = 10000;
};

/// Approximate minimizer of the quadratic model
///   Q(y) = grad^T (y - y0) + 1/2 ||y - y0||^2_hess + (1/t) phi*(-y)
/// around the oracle base point y0.
struct MasterStepResult {
  DualPoint y_next;
  double eps_used = 0.0;  ///< requested eps, raised to a roundoff floor if needed
  int inner_iters = 0;
  double model_gap_bound = 0.0;  ///< certified bound on Q(y_next) - min Q
  double lambda = 0.0;           ///< ||y_next - y0||_hess
  bool closed_form = false;      ///< point composite solved by one linear solve
};

/// Jacobi-preconditioned accelerated proximal gradient with gradient restart.
/// Stops when a subgradient v of Q at the iterate has ||v||^*_hess <= eps,
/// which bounds the hess-distance to the exact minimizer by eps and the
/// model gap by eps^2 / 2.
MasterStepResult scaled_prox(const OracleEval& eval, const CompositeTerm& phi, double eps,
                             const MasterOptions& options = {});

double model_value(const OracleEval& eval, const CompositeTerm& phi, const DualPoint& y);

struct GradientMapping {
  DualPoint prox_point;
  Vec G;                     ///< hess (y0 - prox_point)
  double lambda = 0.0;       ///< ||G||^*_{y0} through the Cholesky factor
  double lambda_primal = 0.0;  ///< ||y0 - prox_point||_hess
  int inner_iters = 0;
};

/// Scaled gradient mapping at the oracle base point, with inner accuracy
/// eps_inner.
GradientMapping gradient_mapping(const OracleEval& eval, const CompositeTerm& phi,
                                 double eps_inner, const MasterOptions& options = {});

}  // namespace ipld
