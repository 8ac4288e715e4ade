#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ipld/scalar.hpp"

namespace ipld {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Smooth convex block term g_i with hand-coded derivatives.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;

  virtual int dim() const = 0;
  /// Open domain of g_i (the whole space unless overridden).
  virtual bool in_domain(const Vec& /*x*/) const { return true; }
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;
  virtual GscParams sc_params() const { return {}; }
};

/// Per-coordinate logarithmic barrier for a product of intervals.
/// Each coordinate has lower < upper with at least one side finite:
/// two-sided coordinates contribute nu = 2, half-intervals nu = 1.
class CoordinateBarrier {
 public:
  CoordinateBarrier() = default;
  CoordinateBarrier(Vec lower, Vec upper);

  static CoordinateBarrier box(int dim, double lower, double upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  double nu() const { return nu_; }
  /// nu + 2 sqrt(nu); stored for reference only.
  double rho() const;

  /// Strict interior membership.
  bool contains(const Vec& x) const;
  /// +infinity outside the interior.
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Vec hessian_diag(const Vec& x) const;
  /// Interval midpoint, or one unit inside a half-interval.
  Vec center() const;

  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

 private:
  Vec lower_;
  Vec upper_;
  double nu_ = 0.0;
};

/// Composite term phi = indicator of a product of intervals C = prod [lo_e, hi_e]
/// (lo_e may be -inf, hi_e may be +inf, lo_e == hi_e gives a point).
/// The dual uses y -> phi*(-y) = sup_{u in C} -y^T u.
class CompositeTerm {
 public:
  CompositeTerm() = default;
  CompositeTerm(Vec lower, Vec upper);

  static CompositeTerm box(Vec lower, Vec upper);
  static CompositeTerm point(Vec b);
  /// Indicator of (-inf, b].
  static CompositeTerm upper_bound(Vec b);
  /// phi = indicator of {0}; its conjugate term vanishes identically.
  static CompositeTerm zero(int n);

  int dim() const { return static_cast<int>(lower_.size()); }
  bool is_point() const { return is_point_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  /// phi*(-y); +infinity when -y is outside the barrier cone of C.
  double conjugate_value(const Vec& y) const;
  /// Euclidean prox of gamma * phi*(-.) at z.
  Vec prox(const Vec& z, double gamma) const;
  /// Same with a per-coordinate step (the term is separable).
  Vec prox(const Vec& z, const Vec& gamma) const;
  Vec project(const Vec& v) const;
  /// max_e dist(v_e, [lo_e, hi_e]).
  double violation(const Vec& v) const;

 private:
  Vec lower_;
  Vec upper_;
  bool is_point_ = false;
};

/// One separable block: g_i, its barrier, and the block column A_i stored
/// densely over the coupling rows it touches.
struct Block {
  std::shared_ptr<const SmoothFunction> smooth;
  CoordinateBarrier barrier;
  std::vector<int> rows;  ///< ascending coupling-row indices
  Mat coupling;           ///< rows.size() x dim

  int dim() const { return barrier.dim(); }
};

struct PrimalPoint {
  std::vector<Vec> blocks;

  std::int64_t size() const;
  Vec flatten() const;
};

using DualPoint = Vec;

/// Separable problem min sum_i g_i(x_i) + phi(A x), x_i in K_i.
/// Immutable after construction.
class ProblemInstance {
 public:
  ProblemInstance(int num_rows, std::vector<Block> blocks, CompositeTerm composite);

  int num_rows() const { return num_rows_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  std::int64_t total_dim() const { return total_dim_; }
  double nu() const { return nu_; }
  double rho() const { return nu_ + 2.0 * std::sqrt(nu_); }
  const Block& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const CompositeTerm& composite() const { return composite_; }

  /// A x.
  Vec apply(const PrimalPoint& x) const;
  /// A_i^T y.
  Vec apply_transpose(int block, const Vec& y) const;
  Eigen::SparseMatrix<double> coupling_matrix() const;

  /// g(x) = sum_i g_i(x_i).
  double smooth_value(const PrimalPoint& x) const;
  /// Interior of K and of dom g, recomputed on every call.
  bool is_interior(const PrimalPoint& x) const;
  PrimalPoint center() const;
  PrimalPoint unflatten(const Vec& flat) const;

 private:
  int num_rows_;
  std::vector<Block> blocks_;
  CompositeTerm composite_;
  std::int64_t total_dim_ = 0;
  double nu_ = 0.0;
};

/// psi_t restricted to one block: (1/t)[g_i(x_i) - y^T A_i x_i] + f_i(x_i).
struct BlockPsi {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

/// `with_value = false` skips the value (left at 0) for Newton-only callers.
BlockPsi evaluate_block_psi(const Block& block, double t, const Vec& x, const Vec& y,
                            bool with_value = true);

/// Value of psi_t restricted to one block.
double block_psi_value(const Block& block, double t, const Vec& x, const Vec& y);

struct PsiEval {
  double value = 0.0;
  std::vector<Vec> gradient;
  std::vector<Mat> hessian;  ///< diagonal blocks; cross-block entries are zero
};

/// psi_t(x; y) = (1/t)[g(x) + t f(x) - y^T A x] with its derivatives.
PsiEval evaluate_psi(const ProblemInstance& instance, double t, const PrimalPoint& x,
                     const DualPoint& y);

/// Cholesky factorization that throws FactorizationError on failure.
Eigen::LLT<Mat> factorize_spd(const Mat& h, const char* what = "matrix");

/// (u^T H u)^{1/2}.
double primal_local_norm(const Mat& hessian, const Vec& u);
/// (v^T H^{-1} v)^{1/2} from a Cholesky factor.
double primal_dual_norm(const Eigen::LLT<Mat>& factor, const Vec& v);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
};

/// Numerical checks of the standing assumptions: full row rank of A
/// (n <= 500), gradient finite differences, Hessian symmetry/PSD, barrier
/// blow-up on rays, boundary membership, and the barrier decrement bound.
ValidationReport validate_instance(const ProblemInstance& instance, std::uint64_t seed = 1);

/// Numerical rank of A A^T with tolerance 1e-10 ||A A^T||.
int coupling_rank(const ProblemInstance& instance);

}  // namespace ipld
