#pragma once

#include <memory>

#include "ipld/applications.hpp"
#include "ipld/functions.hpp"
#include "ipld/problem.hpp"

namespace fixtures {

using ipld::Mat;
using ipld::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// One block, one variable: g(x) = (x - c)^2 / 2 on (0, 1), A = [1].
inline ipld::ProblemInstance scalar_instance(double c, ipld::CompositeTerm composite) {
  ipld::Block b;
  b.smooth = std::make_shared<ipld::QuadraticFunction>(
      ipld::QuadraticFunction::shifted_square(vec({c})));
  b.barrier = ipld::CoordinateBarrier::box(1, 0.0, 1.0);
  b.rows = {0};
  b.coupling = Mat::Ones(1, 1);
  return ipld::ProblemInstance(1, {std::move(b)}, std::move(composite));
}

/// Two quadratic blocks of dimension 2 coupled through two rows.
inline ipld::ProblemInstance two_block_instance() {
  std::vector<ipld::Block> blocks;
  for (int i = 0; i < 2; ++i) {
    ipld::Block b;
    Mat q(2, 2);
    q << 2.0 + i, 0.5, 0.5, 1.0;
    b.smooth = std::make_shared<ipld::QuadraticFunction>(q, vec({-0.3, 0.2 * i}));
    b.barrier = ipld::CoordinateBarrier::box(2, 0.0, 1.0);
    b.rows = {0, 1};
    b.coupling = Mat::Identity(2, 2);
    if (i == 1) b.coupling(0, 1) = 0.5;
    blocks.push_back(std::move(b));
  }
  return ipld::ProblemInstance(2, std::move(blocks),
                               ipld::CompositeTerm::box(vec({0.4, 0.3}), vec({1.2, 1.0})));
}

inline ipld::NumModel small_num(int nodes, std::uint64_t seed, double density = 1.0) {
  const ipld::Network net = ipld::random_network(nodes, seed);
  ipld::NumOptions options;
  options.pair_density = density;
  return ipld::build_num_instance(net, ipld::generate_num(net, seed, options));
}

}  // namespace fixtures
