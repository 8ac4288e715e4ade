#include "ipld/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ipld/errors.hpp"
#include "parallel.hpp"

namespace ipld {

namespace {

Vec gather(const Block& block, const Vec& y) {
  Vec out(static_cast<Eigen::Index>(block.rows.size()));
  for (std::size_t r = 0; r < block.rows.size(); ++r) {
    out[static_cast<Eigen::Index>(r)] = y[block.rows[r]];
  }
  return out;
}

struct BlockSchur {
  double psi_value = 0.0;
  Eigen::LLT<Mat> factor;
  Mat schur;  // A_i H_i^{-1} A_i^T on the block's rows
};

}  // namespace

OracleEval build_oracle(const ProblemInstance& instance, double t, const DualPoint& y,
                        SlaveResult slave) {
  if (y.size() != instance.num_rows()) throw ConfigError("oracle: dual dimension mismatch");
  if (slave.x.blocks.size() != static_cast<std::size_t>(instance.num_blocks())) {
    throw ConfigError("oracle: slave result has the wrong block count");
  }
  const int nb = instance.num_blocks();
  std::vector<BlockSchur> parts(static_cast<std::size_t>(nb));
  // Factors from the slave are at the returned point when present.
  const bool reuse = slave.block_factors.size() == static_cast<std::size_t>(nb) &&
                     std::all_of(slave.block_factors.begin(), slave.block_factors.end(),
                                 [](const auto& f) { return f.info() == Eigen::Success && f.rows() > 0; });
  detail::parallel_for_each_block(nb, [&](int i) {
    const Block& block = instance.block(i);
    const auto slot = static_cast<std::size_t>(i);
    BlockSchur& part = parts[slot];
    const Vec& xi = slave.x.blocks[slot];
    if (reuse) {
      part.psi_value = block_psi_value(block, t, xi, y);
      part.factor = std::move(slave.block_factors[slot]);
    } else {
      const BlockPsi psi = evaluate_block_psi(block, t, xi, y);
      part.psi_value = psi.value;
      part.factor = factorize_spd(psi.hessian, "block Hessian");
    }
    const Mat w = part.factor.solve(block.coupling.transpose());
    part.schur = block.coupling * w;
  });

  OracleEval eval;
  eval.t = t;
  eval.y = y;
  eval.delta_used = slave.delta;
  eval.slave_residual = slave.residual;
  const int n = instance.num_rows();
  eval.hess = Mat::Zero(n, n);
  double psi = 0.0;
  eval.block_factors.reserve(parts.size());
  for (int i = 0; i < nb; ++i) {
    const Block& block = instance.block(i);
    BlockSchur& part = parts[static_cast<std::size_t>(i)];
    psi += part.psi_value;
    for (std::size_t r = 0; r < block.rows.size(); ++r) {
      for (std::size_t c = 0; c < block.rows.size(); ++c) {
        eval.hess(block.rows[r], block.rows[c]) +=
            part.schur(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
    eval.block_factors.push_back(std::move(part.factor));
  }
  const double inv_t = 1.0 / t;
  eval.hess *= inv_t * inv_t;
  eval.hess = 0.5 * (eval.hess + eval.hess.transpose());
  eval.d_value = -psi;
  eval.x_tilde = std::move(slave.x);
  eval.grad = inv_t * instance.apply(eval.x_tilde);
  eval.factor = factorize_spd(eval.hess, "dual Hessian");
  return eval;
}

double dual_norm(const OracleEval& eval, const Vec& u, NormSense sense) {
  if (u.size() != eval.dim()) throw ConfigError("dual_norm: dimension mismatch");
  if (sense == NormSense::kPrimal) return primal_local_norm(eval.hess, u);
  return primal_dual_norm(eval.factor, u);
}

Vec schur_apply(const ProblemInstance& instance, double t, const PrimalPoint& x, const Vec& w) {
  const int nb = instance.num_blocks();
  std::vector<Vec> parts(static_cast<std::size_t>(nb));
  const Vec zero = Vec::Zero(instance.num_rows());
  detail::parallel_for_each_block(nb, [&](int i) {
    const Block& block = instance.block(i);
    const auto slot = static_cast<std::size_t>(i);
    const BlockPsi psi = evaluate_block_psi(block, t, x.blocks[slot], zero);
    const Eigen::LLT<Mat> llt = factorize_spd(psi.hessian, "block Hessian");
    parts[slot] = block.coupling * llt.solve(block.coupling.transpose() * gather(block, w));
  });
  Vec out = Vec::Zero(instance.num_rows());
  for (int i = 0; i < nb; ++i) {
    const Block& block = instance.block(i);
    const Vec& p = parts[static_cast<std::size_t>(i)];
    for (std::size_t r = 0; r < block.rows.size(); ++r) {
      out[block.rows[r]] += p[static_cast<Eigen::Index>(r)];
    }
  }
  return out;
}

double smoothed_dual_objective(const ProblemInstance& instance, double t, const DualPoint& y,
                               double delta_ref) {
  const SlaveResult ref = solve_slave(instance, t, y, delta_ref);
  const PsiEval psi = evaluate_psi(instance, t, ref.x, y);
  return -psi.value + instance.composite().conjugate_value(y) / t;
}

bool OracleErrorReport::passed() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed(); });
}

namespace {

// Sum of |psi_i| over blocks, used to size the rounding allowance of a
// difference of two psi values.
double psi_magnitude(const ProblemInstance& instance, double t, const PrimalPoint& x,
                     const DualPoint& y) {
  double total = 0.0;
  for (int i = 0; i < instance.num_blocks(); ++i) {
    const Block& block = instance.block(i);
    const Vec& xi = x.blocks[static_cast<std::size_t>(i)];
    const double scale = 1.0 / t;
    const Vec aty = block.coupling.transpose() * gather(block, y);
    total += scale * (std::abs(block.smooth->value(xi)) + std::abs(aty.dot(xi))) +
             std::abs(block.barrier.value(xi));
  }
  return total;
}

}  // namespace

OracleErrorReport oracle_error_suite(const ProblemInstance& instance, double t,
                                     const DualPoint& y, const std::vector<double>& deltas,
                                     double delta_ref) {
  const SlaveResult ref_slave = solve_slave(instance, t, y, delta_ref);
  const PrimalPoint x_ref = ref_slave.x;
  const OracleEval exact = build_oracle(instance, t, y, ref_slave);
  const double ref_scale = psi_magnitude(instance, t, x_ref, y);

  OracleErrorReport report;
  for (double delta : deltas) {
    OracleErrorEntry entry;
    entry.requested_delta = delta;
    const OracleEval inexact = build_oracle(instance, t, y, solve_slave(instance, t, y, delta));
    const double dm = local_distance(instance, t, inexact.x_tilde, x_ref);
    entry.measured_delta = dm;

    entry.value_gap = exact.d_value - inexact.d_value;
    entry.value_lower = omega(dm / (1.0 + dm));
    // omega_* needs dm / (1 - dm) < 1.
    entry.value_upper = dm < 0.5 ? omega_star(dm / (1.0 - dm))
                                 : std::numeric_limits<double>::infinity();
    entry.value_slack = 64.0 * std::numeric_limits<double>::epsilon() *
                        (ref_scale + psi_magnitude(instance, t, inexact.x_tilde, y));
    entry.value_ok = entry.value_gap >= entry.value_lower - entry.value_slack &&
                     entry.value_gap <= entry.value_upper + entry.value_slack;

    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(exact.hess, inexact.hess,
                                                     Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success) throw FactorizationError("oracle suite: eigen solve failed");
    entry.eig_min = ges.eigenvalues().minCoeff();
    entry.eig_max = ges.eigenvalues().maxCoeff();
    const double rel = 1e-9;
    if (dm < 1.0) {
      const double lo = (1.0 - dm) * (1.0 - dm);
      entry.sandwich_ok = entry.eig_min >= lo * (1.0 - rel) && entry.eig_max <= (1.0 + rel) / lo;
    }

    entry.grad_error = dual_norm(inexact, inexact.grad - exact.grad, NormSense::kDual);
    entry.grad_ok = entry.grad_error <= dm * (1.0 + rel) + 1e-12;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace ipld
