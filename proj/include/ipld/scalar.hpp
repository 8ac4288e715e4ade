#pragma once

#include <cstdint>

namespace ipld {

// Scalar functions and parameter rules used by the path-following and
// Phase-1 routines. All functions are pure.

/// omega(tau) = tau - ln(1 + tau), tau >= 0.
double omega(double tau);

/// omega_*(tau) = -tau - ln(1 - tau), tau in [0, 1).
double omega_star(double tau);

/// M_t^2 / 4 for t in (0, 1]; equals 1/t.
double mt_coeff(double t);

/// Penalty decrease factor sigma = 1 - 0.29 beta / (0.3 beta + sqrt(nu)).
double sigma_rule(double beta, double nu);

/// c_nu(sigma) = delta / sigma + ((1 - sigma) / sigma) sqrt(nu).
double c_nu(double sigma, double delta, double nu);

/// Damped proximal-Newton step size of the initialization phase.
/// Requires lambda_hat > eps + delta.
double phase1_stepsize(double lambda_hat, double eps, double delta);

/// floor(ln(t0 / eps_hat) / (-ln sigma)).
std::int64_t kmax_bound(double t0, double eps_hat, double sigma);

/// floor(gap / omega(0.97 beta (1 - beta / 100))) + 1.
std::int64_t jmax_bound(double gap, double beta);

/// Guaranteed per-step decrease of the initialization phase,
/// omega(0.97 beta (1 - beta / 100)).
double phase1_min_decrease(double beta);

/// Generalized self-concordance descriptor (M, theta) with an optional
/// strong-convexity modulus mu (0 when unknown).
struct GscParams {
  double M = 2.0;
  double theta = 3.0;
  double mu = 0.0;

  bool is_standard() const { return M == 2.0 && theta == 3.0; }
};

enum class GscRule { kStronglyConvex, kConjugate, kSumWithSelfConcordant };

/// Converts a descriptor with one of the three transfer rules.
/// For kSumWithSelfConcordant `params` describes the generalized part g and
/// `partner_M` is the self-concordance parameter of the other summand.
GscParams gsc_convert(const GscParams& params, GscRule rule, double partner_M = 2.0);

/// Membership in N(a, b) = {(u, v) >= 0 : u^2/(1+u) <= a u + b v,
///                                         v^2/(1+v) <= a v + b u}.
bool in_lemma4_region(double a, double b, double u, double v);

struct Lemma4Report {
  bool contained = false;
  double bound = 0.0;          ///< (a + b) / (1 - a - b)
  std::int64_t grid_points = 0;
  std::int64_t points_in_region = 0;
  double max_coordinate = 0.0;  ///< largest u or v found inside the region
};

/// Enumerates the grid {0, step, 2 step, ...}^2 inside [0, extent]^2 and
/// checks that every point of N(a, b) lies in [0, bound]^2.
Lemma4Report lemma4_region_check(double a, double b, double step, double extent = 5.0);

}  // namespace ipld
