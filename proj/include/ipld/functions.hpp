#pragma once

#include "ipld/problem.hpp"

namespace ipld {

/// 1/2 x^T Q x + c^T x + constant, with Q symmetric positive semidefinite.
class QuadraticFunction final : public SmoothFunction {
 public:
  QuadraticFunction(Mat q, Vec c, double constant = 0.0);

  /// (weight / 2) ||x - center||^2.
  static QuadraticFunction shifted_square(const Vec& center, double weight = 1.0);

  int dim() const override { return static_cast<int>(c_.size()); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;

 private:
  Mat q_;
  Vec c_;
  double constant_;
};

/// Negated log utility with a proximity penalty:
/// -ln(d^T x + mu) + (rho / 2) ||x - r||^2. Domain d^T x + mu > 0.
class LogUtilityFunction final : public SmoothFunction {
 public:
  LogUtilityFunction(Vec d, double mu, Vec r, double rho);

  int dim() const override { return static_cast<int>(d_.size()); }
  bool in_domain(const Vec& x) const override;
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;

 private:
  Vec d_;
  double mu_;
  Vec r_;
  double rho_;
};

/// Linear cost minus weighted log rates: a^T x - c^T ln(H x + g), c >= 0.
/// Domain: (H x + g)_j > 0 wherever c_j > 0.
class LogRateFunction final : public SmoothFunction {
 public:
  LogRateFunction(Vec a, Vec c, Mat h, Vec g);

  int dim() const override { return static_cast<int>(a_.size()); }
  bool in_domain(const Vec& x) const override;
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;

 private:
  Vec a_;
  Vec c_;
  Mat h_;
  Vec g_;
};

}  // namespace ipld
