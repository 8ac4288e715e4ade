#include "ipld/functions.hpp"

#include <limits>
#include <utility>

#include "ipld/errors.hpp"

namespace ipld {

QuadraticFunction::QuadraticFunction(Mat q, Vec c, double constant)
    : q_(std::move(q)), c_(std::move(c)), constant_(constant) {
  if (q_.rows() != c_.size() || q_.cols() != c_.size()) {
    throw ConfigError("quadratic: shape mismatch");
  }
}

QuadraticFunction QuadraticFunction::shifted_square(const Vec& center, double weight) {
  const auto n = center.size();
  return {weight * Mat::Identity(n, n), -weight * center, 0.5 * weight * center.squaredNorm()};
}

double QuadraticFunction::value(const Vec& x) const {
  return 0.5 * x.dot(q_ * x) + c_.dot(x) + constant_;
}

Vec QuadraticFunction::gradient(const Vec& x) const { return q_ * x + c_; }

Mat QuadraticFunction::hessian(const Vec& /*x*/) const { return q_; }

LogUtilityFunction::LogUtilityFunction(Vec d, double mu, Vec r, double rho)
    : d_(std::move(d)), mu_(mu), r_(std::move(r)), rho_(rho) {
  if (d_.size() != r_.size()) throw ConfigError("log utility: shape mismatch");
  if (rho_ < 0.0) throw ConfigError("log utility: rho must be >= 0");
}

bool LogUtilityFunction::in_domain(const Vec& x) const { return d_.dot(x) + mu_ > 0.0; }

double LogUtilityFunction::value(const Vec& x) const {
  const double s = d_.dot(x) + mu_;
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log(s) + 0.5 * rho_ * (x - r_).squaredNorm();
}

Vec LogUtilityFunction::gradient(const Vec& x) const {
  const double s = d_.dot(x) + mu_;
  return -d_ / s + rho_ * (x - r_);
}

Mat LogUtilityFunction::hessian(const Vec& x) const {
  const double s = d_.dot(x) + mu_;
  Mat h = (d_ / s) * (d_ / s).transpose();
  h.diagonal().array() += rho_;
  return h;
}

LogRateFunction::LogRateFunction(Vec a, Vec c, Mat h, Vec g)
    : a_(std::move(a)), c_(std::move(c)), h_(std::move(h)), g_(std::move(g)) {
  const auto m = a_.size();
  if (c_.size() != m || g_.size() != m || h_.rows() != m || h_.cols() != m) {
    throw ConfigError("log rate: shape mismatch");
  }
  if ((c_.array() < 0.0).any()) throw ConfigError("log rate: weights must be >= 0");
}

bool LogRateFunction::in_domain(const Vec& x) const {
  const Vec s = h_ * x + g_;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (c_[j] > 0.0 && !(s[j] > 0.0)) return false;
  }
  return true;
}

double LogRateFunction::value(const Vec& x) const {
  if (!in_domain(x)) return std::numeric_limits<double>::infinity();
  const Vec s = h_ * x + g_;
  double v = a_.dot(x);
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (c_[j] > 0.0) v -= c_[j] * std::log(s[j]);
  }
  return v;
}

Vec LogRateFunction::gradient(const Vec& x) const {
  const Vec s = h_ * x + g_;
  Vec w = Vec::Zero(s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (c_[j] > 0.0) w[j] = c_[j] / s[j];
  }
  return a_ - h_.transpose() * w;
}

Mat LogRateFunction::hessian(const Vec& x) const {
  const Vec s = h_ * x + g_;
  Vec w = Vec::Zero(s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (c_[j] > 0.0) w[j] = c_[j] / (s[j] * s[j]);
  }
  // Small blocks: a coefficient-wise product beats the blocked GEMM path.
  const Mat scaled = w.cwiseSqrt().asDiagonal() * h_;
  return scaled.transpose().lazyProduct(scaled);
}

}  // namespace ipld
