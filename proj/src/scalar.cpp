#include "ipld/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipld/errors.hpp"

namespace ipld {

double omega(double tau) {
  if (!(tau >= 0.0)) throw DomainError("omega: tau must be >= 0, got " + std::to_string(tau));
  return tau - std::log1p(tau);
}

double omega_star(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw DomainError("omega_star: tau must lie in [0, 1), got " + std::to_string(tau));
  }
  return -tau - std::log1p(-tau);
}

double mt_coeff(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("mt_coeff: t must lie in (0, 1]");
  return 1.0 / t;
}

double sigma_rule(double beta, double nu) {
  if (!(beta > 0.0 && beta <= 0.1)) throw DomainError("sigma_rule: beta must lie in (0, 0.1]");
  if (!(nu > 0.0)) throw DomainError("sigma_rule: nu must be positive");
  return 1.0 - 0.29 * beta / (0.3 * beta + std::sqrt(nu));
}

double c_nu(double sigma, double delta, double nu) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw DomainError("c_nu: sigma must lie in (0, 1]");
  return delta / sigma + ((1.0 - sigma) / sigma) * std::sqrt(nu);
}

double phase1_stepsize(double lambda_hat, double eps, double delta) {
  const double excess = lambda_hat - eps - delta;
  if (!(excess > 0.0)) {
    throw DomainError("phase1_stepsize: lambda_hat must exceed eps + delta");
  }
  const double shrink = 1.0 - delta;
  return excess * shrink * shrink / ((1.0 + shrink * excess) * lambda_hat);
}

std::int64_t kmax_bound(double t0, double eps_hat, double sigma) {
  if (!(eps_hat > 0.0 && eps_hat <= t0 && t0 <= 1.0)) {
    throw DomainError("kmax_bound: need 0 < eps_hat <= t0 <= 1");
  }
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("kmax_bound: sigma must lie in (0, 1)");
  return static_cast<std::int64_t>(std::floor(std::log(t0 / eps_hat) / (-std::log(sigma))));
}

double phase1_min_decrease(double beta) { return omega(0.97 * beta * (1.0 - 1e-2 * beta)); }

std::int64_t jmax_bound(double gap, double beta) {
  if (!(gap >= 0.0)) throw DomainError("jmax_bound: gap must be >= 0");
  return static_cast<std::int64_t>(std::floor(gap / phase1_min_decrease(beta))) + 1;
}

GscParams gsc_convert(const GscParams& params, GscRule rule, double partner_M) {
  GscParams out = params;
  switch (rule) {
    case GscRule::kStronglyConvex: {
      if (params.theta == 3.0) return out;
      if (!(params.theta > 0.0 && params.theta < 3.0) || !(params.mu > 0.0)) {
        throw DomainError("gsc_convert: strongly-convex rule needs theta in (0, 3) and mu > 0");
      }
      out.M = std::pow(params.mu, (params.theta - 3.0) / 2.0) * params.M;
      out.theta = 3.0;
      return out;
    }
    case GscRule::kConjugate: {
      if (!(params.theta >= 3.0 && params.theta < 6.0)) {
        throw DomainError("gsc_convert: conjugate rule needs theta in [3, 6)");
      }
      out.theta = 6.0 - params.theta;
      out.mu = 0.0;
      return out;
    }
    case GscRule::kSumWithSelfConcordant: {
      if (!(params.theta > 0.0 && params.theta <= 3.0)) {
        throw DomainError("gsc_convert: sum rule needs theta in (0, 3]");
      }
      double m_hat = params.M;
      if (params.theta < 3.0) {
        if (!(params.mu > 0.0)) throw DomainError("gsc_convert: sum rule with theta < 3 needs mu > 0");
        m_hat = std::pow(params.mu, (params.theta - 3.0) / 2.0) * params.M;
      }
      out.M = std::max(partner_M, m_hat);
      out.theta = 3.0;
      return out;
    }
  }
  throw DomainError("gsc_convert: unknown rule");
}

bool in_lemma4_region(double a, double b, double u, double v) {
  if (u < 0.0 || v < 0.0) return false;
  return u * u / (1.0 + u) <= a * u + b * v && v * v / (1.0 + v) <= a * v + b * u;
}

Lemma4Report lemma4_region_check(double a, double b, double step, double extent) {
  if (!(a > 0.0 && b > 0.0 && a + b < 1.0)) {
    throw DomainError("lemma4_region_check: need a, b > 0 and a + b < 1");
  }
  Lemma4Report report;
  report.bound = (a + b) / (1.0 - a - b);
  report.contained = true;
  const auto cells = static_cast<std::int64_t>(std::floor(extent / step + 1e-9));
  for (std::int64_t i = 0; i <= cells; ++i) {
    const double u = static_cast<double>(i) * step;
    for (std::int64_t j = 0; j <= cells; ++j) {
      const double v = static_cast<double>(j) * step;
      ++report.grid_points;
      if (!in_lemma4_region(a, b, u, v)) continue;
      ++report.points_in_region;
      report.max_coordinate = std::max({report.max_coordinate, u, v});
      // Relative slack absorbs roundoff for grid points sitting on the bound.
      if (u > report.bound * (1.0 + 1e-12) || v > report.bound * (1.0 + 1e-12)) {
        report.contained = false;
      }
    }
  }
  return report;
}

}  // namespace ipld
