#include "ipld/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipld/errors.hpp"

namespace ipld {

double model_value(const OracleEval& eval, const CompositeTerm& phi, const DualPoint& y) {
  const Vec d = y - eval.y;
  return eval.grad.dot(d) + 0.5 * d.dot(eval.hess * d) + phi.conjugate_value(y) / eval.t;
}

MasterStepResult scaled_prox(const OracleEval& eval, const CompositeTerm& phi, double eps,
                             const MasterOptions& options) {
  if (!(eps > 0.0)) throw DomainError("scaled_prox: eps must be positive");
  if (phi.dim() != eval.dim()) throw ConfigError("scaled_prox: composite dimension mismatch");
  MasterStepResult out;
  out.eps_used = eps;

  if (phi.is_point()) {
    // phi*(-y) = -b^T y is linear: hess (y - y0) = b / t - grad.
    const Vec rhs = phi.lower() / eval.t - eval.grad;
    out.y_next = eval.y + eval.factor.solve(rhs);
    out.closed_form = true;
    out.lambda = dual_norm(eval, out.y_next - eval.y, NormSense::kPrimal);
    return out;
  }

  // FISTA in the Jacobi-scaled coordinates w = P^{1/2} y, P = diag(hess).
  const Vec p = eval.hess.diagonal();
  if (!(p.minCoeff() > 0.0)) throw FactorizationError("scaled_prox: dual Hessian diagonal not positive");
  const Vec p_isqrt = p.cwiseSqrt().cwiseInverse();
  const Mat scaled = p_isqrt.asDiagonal() * eval.hess * p_isqrt.asDiagonal();
  Vec v = Vec::Ones(eval.dim());
  double lip = 0.0;
  for (int it = 0; it < 50; ++it) {
    const Vec next = scaled * v;
    const double est = next.norm() / v.norm();
    v = next / next.norm();
    if (std::abs(est - lip) <= 1e-6 * est) {
      lip = est;
      break;
    }
    lip = est;
  }
  // Power iteration approaches from below; the stopping test below does not
  // depend on lip, only the convergence speed does.
  lip *= 1.05;
  const Vec step = (lip * p).cwiseInverse();
  const Vec gamma = step / eval.t;

  // Below a few ulps of the problem scale the certificate only measures
  // roundoff; the effective tolerance is reported in eps_used.
  const double scale = dual_norm(eval, eval.y, NormSense::kPrimal) +
                       dual_norm(eval, eval.grad, NormSense::kDual);
  const double tol = std::max(eps, 16.0 * std::numeric_limits<double>::epsilon() * scale);
  out.eps_used = tol;

  // Products with hess are carried along so each pass costs one mat-vec.
  const Vec h_base = eval.hess * eval.y;
  Vec y_prev = eval.y;
  Vec h_prev = h_base;
  Vec z = eval.y;
  Vec h_z = h_base;
  double theta = 1.0;
  double last = 0.0;
  for (int k = 1; k <= options.max_inner; ++k) {
    const Vec grad_z = eval.grad + h_z - h_base;
    Vec y = phi.prox(z - step.cwiseProduct(grad_z), gamma);
    Vec h_y = eval.hess * y;
    const Vec move = z - y;
    // v = (lip P)(z - y) + hess (y - z) lies in the subdifferential of Q at y,
    // and Q is 1-strongly convex in the hess metric: ||y - y*||_hess <= ||v||^*.
    const Vec sub = (lip * p).cwiseProduct(move) - (h_z - h_y);
    last = dual_norm(eval, sub, NormSense::kDual);
    if (last <= tol) {
      out.inner_iters = k;
      out.model_gap_bound = 0.5 * last * last;
      out.lambda = dual_norm(eval, y - eval.y, NormSense::kPrimal);
      out.y_next = std::move(y);
      return out;
    }
    if (move.dot(p.cwiseProduct(y - y_prev)) > 0.0) theta = 1.0;
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double mom = (theta - 1.0) / theta_next;
    z = y + mom * (y - y_prev);
    h_z = h_y + mom * (h_y - h_prev);
    y_prev = std::move(y);
    h_prev = std::move(h_y);
    theta = theta_next;
  }
  throw ConvergenceError("scaled_prox: inner iteration cap reached", last);
}

GradientMapping gradient_mapping(const OracleEval& eval, const CompositeTerm& phi,
                                 double eps_inner, const MasterOptions& options) {
  const MasterStepResult step = scaled_prox(eval, phi, eps_inner, options);
  GradientMapping out;
  out.prox_point = step.y_next;
  out.G = eval.hess * (eval.y - step.y_next);
  out.lambda = dual_norm(eval, out.G, NormSense::kDual);
  out.lambda_primal = step.lambda;
  out.inner_iters = step.inner_iters;
  return out;
}

}  // namespace ipld
