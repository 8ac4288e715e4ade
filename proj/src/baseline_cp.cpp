#include "ipld/baseline_cp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "ipld/errors.hpp"

namespace ipld {

double estimate_operator_norm(const Eigen::SparseMatrix<double>& K, double rel_tol,
                              double inflation) {
  if (K.nonZeros() == 0) return 0.0;
  Vec v = Vec::Ones(K.cols()) / std::sqrt(static_cast<double>(K.cols()));
  double est = 0.0;
  for (int it = 0; it < 100000; ++it) {
    const Vec w = K.transpose() * (K * v);
    const double next = std::sqrt(w.norm());
    if (next == 0.0) return 0.0;
    v = w / w.norm();
    if (std::abs(next - est) <= rel_tol * next) {
      est = next;
      break;
    }
    est = next;
  }
  return inflation * est;
}

CpResult cp_solve(const CpProblem& problem, const CpOptions& options) {
  if (!(options.tau > 0.0)) throw ConfigError("cp: tau must be positive");
  if (options.max_iter < 1 || options.check_every < 1) throw ConfigError("cp: bad iteration limits");
  const auto start = std::chrono::steady_clock::now();
  const Eigen::SparseMatrix<double>& K = problem.K;
  const Eigen::SparseMatrix<double> Kt = K.transpose();

  CpResult out;
  out.tau = options.tau;
  out.sigma = problem.norm_K > 0.0 ? 0.99 / (options.tau * problem.norm_K * problem.norm_K) : 1.0;
  Vec u = problem.u0.size() == K.cols() ? problem.u0 : Vec(Vec::Zero(K.cols()));
  Vec s = problem.s0.size() == K.rows() ? problem.s0 : Vec(Vec::Zero(K.rows()));

  for (int k = 1; k <= options.max_iter; ++k) {
    const Vec u_next = problem.prox_g(u - options.tau * (Kt * s), options.tau);
    const Vec u_bar = 2.0 * u_next - u;
    s = problem.prox_fstar(s + out.sigma * (K * u_bar), out.sigma);
    const double change = (u_next - u).norm() / std::max(1.0, u_next.norm());
    u = u_next;
    out.iterations = k;

    if (k % options.check_every != 0 && k != options.max_iter) continue;
    CpHistoryEntry h;
    h.k = k;
    h.objective = problem.primal_objective(u);
    h.feasibility = problem.feasibility(u);
    if (problem.dual_objective) {
      const double dual = problem.dual_objective(s);
      h.relative_gap = std::abs(h.objective - dual) / std::max(1.0, std::abs(h.objective));
    } else {
      h.relative_gap = change;
      h.gap_from_stagnation = true;
    }
    out.history.push_back(h);
    out.objective = h.objective;
    out.feasibility = h.feasibility;
    out.relative_gap = h.relative_gap;
    out.gap_from_stagnation = h.gap_from_stagnation;
    if (h.feasibility <= options.tol_feas && h.relative_gap <= options.tol_gap) {
      out.converged = true;
      break;
    }
  }
  out.u = std::move(u);
  out.s = std::move(s);
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CpResult cp_solve_grid(const CpProblem& problem, const std::vector<double>& taus,
                       CpOptions options) {
  if (taus.empty()) throw ConfigError("cp: empty tau grid");
  std::optional<CpResult> best;
  for (double tau : taus) {
    options.tau = tau;
    CpResult r = cp_solve(problem, options);
    const bool better =
        !best || (r.converged && !best->converged) ||
        (r.converged == best->converged &&
         (r.converged ? r.iterations < best->iterations : r.feasibility < best->feasibility));
    if (better) best = std::move(r);
  }
  return std::move(*best);
}

namespace {

// Position of each pair's x coordinate in the stacked primal vector, in
// block order (which is also pair order).
struct NumLayout {
  int p = 0;
  int blocks = 0;
  std::vector<int> block_offset;
};

NumLayout num_layout(const NumModel& model) {
  NumLayout layout;
  layout.blocks = static_cast<int>(model.block_nodes.size());
  for (const auto& qs : model.block_pairs) {
    layout.block_offset.push_back(layout.p);
    layout.p += static_cast<int>(qs.size());
  }
  return layout;
}

}  // namespace

CpProblem build_cp_num(const NumModel& model) {
  const NumData& data = model.data;
  const ProblemInstance& inst = model.problem();
  const NumLayout layout = num_layout(model);
  const int p = layout.p;
  const int nb = layout.blocks;
  const int rows = inst.num_rows();

  Vec r(p);
  Vec mu(nb);
  std::vector<Eigen::Triplet<double>> trip;
  for (int b = 0; b < nb; ++b) {
    const int i = model.block_nodes[static_cast<std::size_t>(b)];
    mu[b] = data.mu[i];
    const auto& qs = model.block_pairs[static_cast<std::size_t>(b)];
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const int col = layout.block_offset[static_cast<std::size_t>(b)] + static_cast<int>(k);
      const int j = data.pairs[static_cast<std::size_t>(qs[k])].second;
      r[col] = data.r[static_cast<std::size_t>(i)][j];
      trip.emplace_back(b, col, data.d[static_cast<std::size_t>(i)][j]);
    }
    trip.emplace_back(b, p + b, -1.0);
  }
  const Eigen::SparseMatrix<double> A = inst.coupling_matrix();
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      trip.emplace_back(nb + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }

  CpProblem prob;
  prob.K.resize(nb + rows, p + nb);
  prob.K.setFromTriplets(trip.begin(), trip.end());
  prob.norm_K = estimate_operator_norm(prob.K);

  const double rho = data.rho;
  const double cap = data.rate_cap;
  const Vec lower = inst.composite().lower();
  const Vec upper = inst.composite().upper();

  prob.prox_g = [=](const Vec& v, double tau) {
    Vec out(v.size());
    out.head(p) = ((v.head(p) + tau * rho * r) / (1.0 + tau * rho)).cwiseMax(0.0).cwiseMin(cap);
    const Vec vz = v.tail(nb);
    out.tail(nb) = 0.5 * (vz.array() + (vz.array().square() + 4.0 * tau).sqrt()).matrix();
    return out;
  };
  prob.prox_fstar = [=](const Vec& v, double sigma) {
    Vec out(v.size());
    out.head(nb) = v.head(nb) + sigma * mu;
    const Vec v2 = v.tail(rows);
    out.tail(rows) = v2 - sigma * (v2 / sigma).cwiseMax(lower).cwiseMin(upper);
    return out;
  };

  const Eigen::SparseMatrix<double> D = prob.K.topLeftCorner(nb, p);
  prob.primal_objective = [=](const Vec& u) {
    const Vec x = u.head(p);
    const Vec z = D * x + mu;
    if ((z.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    return -z.array().log().sum() + 0.5 * rho * (x - r).squaredNorm();
  };
  const Eigen::SparseMatrix<double> Kt = prob.K.transpose();
  prob.dual_objective = [=](const Vec& s) {
    const Vec w = -(Kt * s);
    double gstar = 0.0;
    const Vec wx = w.head(p);
    if (rho > 0.0) {
      const Vec x = (r + wx / rho).cwiseMax(0.0).cwiseMin(cap);
      gstar += wx.dot(x) - 0.5 * rho * (x - r).squaredNorm();
    } else {
      gstar += cap * wx.cwiseMax(0.0).sum();
    }
    for (int b = 0; b < nb; ++b) {
      const double wz = w[p + b];
      if (!(wz < 0.0)) return -std::numeric_limits<double>::infinity();
      gstar += -1.0 - std::log(-wz);
    }
    const Vec s2 = s.tail(rows);
    const double fstar = -mu.dot(s.head(nb)) + s2.cwiseMax(0.0).dot(upper) + s2.cwiseMin(0.0).dot(lower);
    return -gstar - fstar;
  };
  const CompositeTerm composite = inst.composite();
  prob.feasibility = [=](const Vec& u) {
    const Vec ax = A * u.head(p);
    const Vec z_gap = D * u.head(p) + mu - u.tail(nb);
    return std::max(composite.violation(ax), z_gap.cwiseAbs().maxCoeff());
  };

  // Start at the box midpoint with its consistent z.
  prob.u0 = Vec::Zero(p + nb);
  prob.u0.head(p).setConstant(0.5 * cap);
  prob.u0.tail(nb) = D * prob.u0.head(p) + mu;
  prob.s0 = Vec::Zero(nb + rows);
  return prob;
}

PrimalPoint num_cp_primal(const NumModel& model, const Vec& u) {
  const NumLayout layout = num_layout(model);
  PrimalPoint x;
  for (int b = 0; b < layout.blocks; ++b) {
    const auto len = static_cast<Eigen::Index>(model.block_pairs[static_cast<std::size_t>(b)].size());
    x.blocks.push_back(u.segment(layout.block_offset[static_cast<std::size_t>(b)], len));
  }
  return x;
}

}  // namespace ipld
