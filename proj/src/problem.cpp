#include "ipld/problem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <sstream>
#include <utility>

#include "ipld/errors.hpp"
#include "ipld/rng.hpp"

namespace ipld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// CoordinateBarrier

CoordinateBarrier::CoordinateBarrier(Vec lower, Vec upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw ConfigError("barrier: bound sizes differ");
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool hi = std::isfinite(upper_[j]);
    if (!lo && !hi) throw ConfigError("barrier: coordinate without a finite bound");
    if (!(lower_[j] < upper_[j])) throw ConfigError("barrier: empty interior");
    nu_ += (lo ? 1.0 : 0.0) + (hi ? 1.0 : 0.0);
  }
}

CoordinateBarrier CoordinateBarrier::box(int dim, double lower, double upper) {
  return {Vec::Constant(dim, lower), Vec::Constant(dim, upper)};
}

double CoordinateBarrier::rho() const { return nu_ + 2.0 * std::sqrt(nu_); }

bool CoordinateBarrier::contains(const Vec& x) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x[j] > lower_[j] && x[j] < upper_[j])) return false;
  }
  return true;
}

double CoordinateBarrier::value(const Vec& x) const {
  if (!contains(x)) return kInf;
  double v = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (std::isfinite(lower_[j])) v -= std::log(x[j] - lower_[j]);
    if (std::isfinite(upper_[j])) v -= std::log(upper_[j] - x[j]);
  }
  return v;
}

Vec CoordinateBarrier::gradient(const Vec& x) const {
  Vec g = Vec::Zero(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (std::isfinite(lower_[j])) g[j] -= 1.0 / (x[j] - lower_[j]);
    if (std::isfinite(upper_[j])) g[j] += 1.0 / (upper_[j] - x[j]);
  }
  return g;
}

Vec CoordinateBarrier::hessian_diag(const Vec& x) const {
  Vec h = Vec::Zero(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (std::isfinite(lower_[j])) {
      const double s = x[j] - lower_[j];
      h[j] += 1.0 / (s * s);
    }
    if (std::isfinite(upper_[j])) {
      const double s = upper_[j] - x[j];
      h[j] += 1.0 / (s * s);
    }
  }
  return h;
}

Vec CoordinateBarrier::center() const {
  Vec c(lower_.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool hi = std::isfinite(upper_[j]);
    if (lo && hi) {
      c[j] = 0.5 * (lower_[j] + upper_[j]);
    } else if (lo) {
      c[j] = lower_[j] + 1.0;
    } else {
      c[j] = upper_[j] - 1.0;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// CompositeTerm

CompositeTerm::CompositeTerm(Vec lower, Vec upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw ConfigError("composite: bound sizes differ");
  is_point_ = true;
  for (Eigen::Index e = 0; e < lower_.size(); ++e) {
    if (!(lower_[e] <= upper_[e])) throw ConfigError("composite: empty interval");
    if (lower_[e] != upper_[e]) is_point_ = false;
  }
}

CompositeTerm CompositeTerm::box(Vec lower, Vec upper) {
  return {std::move(lower), std::move(upper)};
}

CompositeTerm CompositeTerm::point(Vec b) {
  Vec copy = b;
  return {std::move(b), std::move(copy)};
}

CompositeTerm CompositeTerm::upper_bound(Vec b) {
  return {Vec::Constant(b.size(), -kInf), std::move(b)};
}

CompositeTerm CompositeTerm::zero(int n) { return point(Vec::Zero(n)); }

double CompositeTerm::conjugate_value(const Vec& y) const {
  // sup_{u in C} -y^T u, coordinatewise.
  double v = 0.0;
  for (Eigen::Index e = 0; e < y.size(); ++e) {
    const double w = -y[e];
    if (w > 0.0) {
      if (!std::isfinite(upper_[e])) return kInf;
      v += w * upper_[e];
    } else if (w < 0.0) {
      if (!std::isfinite(lower_[e])) return kInf;
      v += w * lower_[e];
    }
  }
  return v;
}

Vec CompositeTerm::project(const Vec& v) const { return v.cwiseMax(lower_).cwiseMin(upper_); }

Vec CompositeTerm::prox(const Vec& z, double gamma) const {
  // Moreau decomposition: prox_{gamma s}(z) = z + gamma P_C(-z / gamma).
  return z + gamma * project(-z / gamma);
}

Vec CompositeTerm::prox(const Vec& z, const Vec& gamma) const {
  const Vec scaled = (-z.array() / gamma.array()).matrix();
  return z + (gamma.array() * project(scaled).array()).matrix();
}

double CompositeTerm::violation(const Vec& v) const {
  double worst = 0.0;
  for (Eigen::Index e = 0; e < v.size(); ++e) {
    worst = std::max({worst, lower_[e] - v[e], v[e] - upper_[e]});
  }
  return worst;
}

// ---------------------------------------------------------------------------
// PrimalPoint / ProblemInstance

std::int64_t PrimalPoint::size() const {
  std::int64_t total = 0;
  for (const auto& b : blocks) total += b.size();
  return total;
}

Vec PrimalPoint::flatten() const {
  Vec flat(size());
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    flat.segment(offset, b.size()) = b;
    offset += b.size();
  }
  return flat;
}

ProblemInstance::ProblemInstance(int num_rows, std::vector<Block> blocks, CompositeTerm composite)
    : num_rows_(num_rows), blocks_(std::move(blocks)), composite_(std::move(composite)) {
  if (num_rows_ <= 0) throw ConfigError("instance: need at least one coupling row");
  if (composite_.dim() != num_rows_) throw ConfigError("instance: composite dimension mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    std::ostringstream where;
    where << "instance: block " << i << ": ";
    if (!b.smooth) throw ConfigError(where.str() + "missing smooth term");
    if (b.smooth->dim() != b.dim()) throw ConfigError(where.str() + "smooth/barrier dim mismatch");
    if (b.coupling.cols() != b.dim() ||
        b.coupling.rows() != static_cast<Eigen::Index>(b.rows.size())) {
      throw ConfigError(where.str() + "coupling shape mismatch");
    }
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
      if (b.rows[r] < 0 || b.rows[r] >= num_rows_ || (r > 0 && b.rows[r] <= b.rows[r - 1])) {
        throw ConfigError(where.str() + "coupling rows must be ascending and in range");
      }
    }
    total_dim_ += b.dim();
    nu_ += b.barrier.nu();
  }
}

Vec ProblemInstance::apply(const PrimalPoint& x) const {
  Vec ax = Vec::Zero(num_rows_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    const Vec local = b.coupling * x.blocks[i];
    for (std::size_t r = 0; r < b.rows.size(); ++r) ax[b.rows[r]] += local[static_cast<Eigen::Index>(r)];
  }
  return ax;
}

Vec ProblemInstance::apply_transpose(int block, const Vec& y) const {
  const Block& b = blocks_[static_cast<std::size_t>(block)];
  Vec local(static_cast<Eigen::Index>(b.rows.size()));
  for (std::size_t r = 0; r < b.rows.size(); ++r) local[static_cast<Eigen::Index>(r)] = y[b.rows[r]];
  return b.coupling.transpose() * local;
}

Eigen::SparseMatrix<double> ProblemInstance::coupling_matrix() const {
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::Index offset = 0;
  for (const Block& b : blocks_) {
    for (Eigen::Index c = 0; c < b.coupling.cols(); ++c) {
      for (Eigen::Index r = 0; r < b.coupling.rows(); ++r) {
        const double v = b.coupling(r, c);
        if (v != 0.0) entries.emplace_back(b.rows[static_cast<std::size_t>(r)], offset + c, v);
      }
    }
    offset += b.dim();
  }
  Eigen::SparseMatrix<double> a(num_rows_, total_dim_);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

double ProblemInstance::smooth_value(const PrimalPoint& x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) v += blocks_[i].smooth->value(x.blocks[i]);
  return v;
}

bool ProblemInstance::is_interior(const PrimalPoint& x) const {
  if (x.blocks.size() != blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (!blocks_[i].barrier.contains(x.blocks[i])) return false;
    if (!blocks_[i].smooth->in_domain(x.blocks[i])) return false;
  }
  return true;
}

PrimalPoint ProblemInstance::center() const {
  PrimalPoint x;
  x.blocks.reserve(blocks_.size());
  for (const Block& b : blocks_) x.blocks.push_back(b.barrier.center());
  return x;
}

PrimalPoint ProblemInstance::unflatten(const Vec& flat) const {
  if (flat.size() != total_dim_) throw ConfigError("unflatten: size mismatch");
  PrimalPoint x;
  Eigen::Index offset = 0;
  for (const Block& b : blocks_) {
    x.blocks.push_back(flat.segment(offset, b.dim()));
    offset += b.dim();
  }
  return x;
}

// ---------------------------------------------------------------------------
// psi_t and local norms

BlockPsi evaluate_block_psi(const Block& block, double t, const Vec& x, const Vec& y,
                            bool with_value) {
  if (!block.barrier.contains(x) || !block.smooth->in_domain(x)) {
    throw DomainError("psi: point outside the interior");
  }
  const double scale = mt_coeff(t);
  Vec local_y(static_cast<Eigen::Index>(block.rows.size()));
  for (std::size_t r = 0; r < block.rows.size(); ++r) {
    local_y[static_cast<Eigen::Index>(r)] = y[block.rows[r]];
  }
  const Vec aty = block.coupling.transpose() * local_y;

  BlockPsi out;
  if (with_value) {
    out.value = scale * (block.smooth->value(x) - aty.dot(x)) + block.barrier.value(x);
  }
  out.gradient = scale * (block.smooth->gradient(x) - aty) + block.barrier.gradient(x);
  out.hessian = scale * block.smooth->hessian(x);
  out.hessian.diagonal() += block.barrier.hessian_diag(x);
  return out;
}

double block_psi_value(const Block& block, double t, const Vec& x, const Vec& y) {
  if (!block.barrier.contains(x) || !block.smooth->in_domain(x)) {
    throw DomainError("psi: point outside the interior");
  }
  Vec local_y(static_cast<Eigen::Index>(block.rows.size()));
  for (std::size_t r = 0; r < block.rows.size(); ++r) {
    local_y[static_cast<Eigen::Index>(r)] = y[block.rows[r]];
  }
  const double aty_x = local_y.dot(block.coupling * x);
  return mt_coeff(t) * (block.smooth->value(x) - aty_x) + block.barrier.value(x);
}

PsiEval evaluate_psi(const ProblemInstance& instance, double t, const PrimalPoint& x,
                     const DualPoint& y) {
  if (x.blocks.size() != static_cast<std::size_t>(instance.num_blocks())) {
    throw ConfigError("psi: block count mismatch");
  }
  PsiEval out;
  out.gradient.reserve(x.blocks.size());
  out.hessian.reserve(x.blocks.size());
  for (int i = 0; i < instance.num_blocks(); ++i) {
    BlockPsi b = evaluate_block_psi(instance.block(i), t, x.blocks[static_cast<std::size_t>(i)], y);
    out.value += b.value;
    out.gradient.push_back(std::move(b.gradient));
    out.hessian.push_back(std::move(b.hessian));
  }
  return out;
}

Eigen::LLT<Mat> factorize_spd(const Mat& h, const char* what) {
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(std::string(what) + " is not positive definite");
  }
  return llt;
}

double primal_local_norm(const Mat& hessian, const Vec& u) {
  return std::sqrt(std::max(0.0, u.dot(hessian * u)));
}

double primal_dual_norm(const Eigen::LLT<Mat>& factor, const Vec& v) {
  if (factor.info() != Eigen::Success) throw FactorizationError("dual norm: invalid factor");
  return factor.matrixL().solve(v).norm();
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

int coupling_rank(const ProblemInstance& instance) {
  const Eigen::SparseMatrix<double> a = instance.coupling_matrix();
  const Mat gram = Mat(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  const Vec& ev = eig.eigenvalues();
  const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > 1e-10 * top).count());
}

namespace {

Vec random_interior(const CoordinateBarrier& barrier, Rng& rng) {
  Vec x(barrier.dim());
  for (int j = 0; j < barrier.dim(); ++j) {
    const double lo = barrier.lower()[j];
    const double hi = barrier.upper()[j];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      x[j] = lo + rng.uniform(0.1, 0.9) * (hi - lo);
    } else if (std::isfinite(lo)) {
      x[j] = lo + rng.uniform(0.5, 2.0);
    } else {
      x[j] = hi - rng.uniform(0.5, 2.0);
    }
  }
  return x;
}

template <class F>
Vec central_difference(const F& f, const Vec& x) {
  Vec fd(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Vec xp = x;
    Vec xm = x;
    xp[j] += h;
    xm[j] -= h;
    fd[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return fd;
}

double relative_error(const Vec& approx, const Vec& exact) {
  return (approx - exact).lpNorm<Eigen::Infinity>() /
         std::max(1.0, exact.lpNorm<Eigen::Infinity>());
}

}  // namespace

ValidationReport validate_instance(const ProblemInstance& instance, std::uint64_t seed) {
  ValidationReport report;
  Rng rng(seed, "validate");

  if (instance.num_rows() <= 500) {
    const int rank = coupling_rank(instance);
    ValidationCheck c{"coupling_full_row_rank", rank == instance.num_rows(), double(rank), ""};
    c.detail = "rank " + std::to_string(rank) + " of " + std::to_string(instance.num_rows());
    report.checks.push_back(std::move(c));
  } else {
    report.checks.push_back({"coupling_full_row_rank", true, 0.0, "skipped (n > 500)"});
  }

  double worst_grad = 0.0;
  double worst_barrier_grad = 0.0;
  double worst_psd = 0.0;
  double worst_decrement = 0.0;
  bool blow_up = true;
  bool boundary_rejected = true;
  bool domain_ok = true;

  for (int i = 0; i < instance.num_blocks(); ++i) {
    const Block& b = instance.block(i);
    Vec x = random_interior(b.barrier, rng);
    if (!b.smooth->in_domain(x)) x = b.barrier.center();
    if (!b.smooth->in_domain(x)) {
      domain_ok = false;
      continue;
    }

    const Vec grad = b.smooth->gradient(x);
    const Vec fd = central_difference([&](const Vec& z) { return b.smooth->value(z); }, x);
    worst_grad = std::max(worst_grad, relative_error(fd, grad));

    const Vec bgrad = b.barrier.gradient(x);
    const Vec bfd = central_difference([&](const Vec& z) { return b.barrier.value(z); }, x);
    worst_barrier_grad = std::max(worst_barrier_grad, relative_error(bfd, bgrad));

    const Mat hess = b.smooth->hessian(x);
    const double asym = (hess - hess.transpose()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (hess + hess.transpose()), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    worst_psd = std::max({worst_psd, asym / scale, -eig.eigenvalues().minCoeff() / scale});

    // ||grad f||_x^*2 = sum g_j^2 / h_j for a diagonal barrier Hessian.
    const Vec bh = b.barrier.hessian_diag(x);
    const double decrement = (bgrad.array().square() / bh.array()).sum();
    worst_decrement = std::max(worst_decrement, decrement / b.barrier.nu());

    // Ray from the center towards a random direction until the boundary.
    const Vec c = b.barrier.center();
    Vec dir(b.dim());
    for (int j = 0; j < b.dim(); ++j) dir[j] = rng.uniform(-1.0, 1.0);
    if (dir.norm() == 0.0) dir.setOnes();
    double reach = std::numeric_limits<double>::infinity();
    for (int j = 0; j < b.dim(); ++j) {
      if (dir[j] > 0.0 && std::isfinite(b.barrier.upper()[j])) {
        reach = std::min(reach, (b.barrier.upper()[j] - c[j]) / dir[j]);
      } else if (dir[j] < 0.0 && std::isfinite(b.barrier.lower()[j])) {
        reach = std::min(reach, (b.barrier.lower()[j] - c[j]) / dir[j]);
      }
    }
    if (std::isfinite(reach)) {
      const double base = b.barrier.value(c);
      double previous = base;
      for (int k = 1; k <= 12; ++k) {
        const double v = b.barrier.value(c + reach * (1.0 - std::pow(10.0, -k)) * dir);
        if (!(v > previous)) blow_up = false;
        previous = v;
      }
      if (!(previous > base + 10.0)) blow_up = false;
      if (b.barrier.contains(c + reach * dir)) boundary_rejected = false;
    }
  }

  auto add = [&](const std::string& name, bool ok, double value) {
    report.checks.push_back({name, ok, value, ""});
  };
  add("smooth_in_domain", domain_ok, domain_ok ? 1.0 : 0.0);
  add("smooth_gradient_fd", worst_grad <= 1e-5, worst_grad);
  add("barrier_gradient_fd", worst_barrier_grad <= 1e-5, worst_barrier_grad);
  add("smooth_hessian_psd", worst_psd <= 1e-10, worst_psd);
  add("barrier_decrement_le_nu", worst_decrement <= 1.0 + 1e-12, worst_decrement);
  add("barrier_blow_up", blow_up, blow_up ? 1.0 : 0.0);
  add("boundary_not_interior", boundary_rejected, boundary_rejected ? 1.0 : 0.0);
  return report;
}

}  // namespace ipld
