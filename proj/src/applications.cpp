#include "ipld/applications.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <set>

#include "ipld/errors.hpp"
#include "ipld/functions.hpp"
#include "ipld/rng.hpp"

namespace ipld {

// ---------------------------------------------------------------------------
// Graphs and routing

int Network::edge_index(int u, int v) const {
  const std::pair<int, int> key{std::min(u, v), std::max(u, v)};
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

std::vector<std::vector<int>> Network::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_nodes));
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

Network make_network(int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  if (num_nodes < 0) throw ConfigError("network: negative node count");
  std::set<std::pair<int, int>> unique;
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw ConfigError("network: edge endpoint out of range");
    }
    if (u == v) continue;
    unique.insert({std::min(u, v), std::max(u, v)});
  }
  Network net;
  net.num_nodes = num_nodes;
  net.edges.assign(unique.begin(), unique.end());
  return net;
}

BfsTree bfs_tree(const Network& net, int source) {
  if (source < 0 || source >= net.num_nodes) throw ConfigError("bfs: source out of range");
  const auto adj = net.adjacency();
  BfsTree tree;
  tree.dist.assign(static_cast<std::size_t>(net.num_nodes), -1);
  tree.pred.assign(static_cast<std::size_t>(net.num_nodes), -1);
  std::deque<int> queue{source};
  tree.dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (tree.dist[static_cast<std::size_t>(v)] >= 0) continue;
      tree.dist[static_cast<std::size_t>(v)] = tree.dist[static_cast<std::size_t>(u)] + 1;
      queue.push_back(v);
    }
  }
  // Smallest-index neighbor on the previous layer, independent of queue order.
  for (int v = 0; v < net.num_nodes; ++v) {
    const int dv = tree.dist[static_cast<std::size_t>(v)];
    if (dv <= 0) continue;
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (tree.dist[static_cast<std::size_t>(u)] == dv - 1) {
        tree.pred[static_cast<std::size_t>(v)] = u;
        break;
      }
    }
  }
  return tree;
}

namespace {

std::vector<int> path_from_tree(const Network& net, const BfsTree& tree, int i, int j) {
  if (i == j) return {};
  if (tree.dist[static_cast<std::size_t>(j)] < 0) {
    throw ConfigError("routing: node " + std::to_string(j) + " unreachable from " +
                      std::to_string(i));
  }
  std::vector<int> path;
  for (int v = j; v != i; v = tree.pred[static_cast<std::size_t>(v)]) {
    path.push_back(net.edge_index(v, tree.pred[static_cast<std::size_t>(v)]));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<int> shortest_path(const Network& net, int i, int j) {
  if (j < 0 || j >= net.num_nodes) throw ConfigError("routing: target out of range");
  if (i == j) return {};
  return path_from_tree(net, bfs_tree(net, i), i, j);
}

std::vector<std::vector<int>> shortest_paths(const Network& net,
                                             const std::vector<std::pair<int, int>>& pairs) {
  std::map<int, BfsTree> trees;
  std::vector<std::vector<int>> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (j < 0 || j >= net.num_nodes) throw ConfigError("routing: target out of range");
    auto it = trees.find(i);
    if (it == trees.end()) it = trees.emplace(i, bfs_tree(net, i)).first;
    out.push_back(path_from_tree(net, it->second, i, j));
  }
  return out;
}

Network bfs_ball(const Network& net, int root, int count) {
  if (count < 1) throw ConfigError("bfs_ball: count must be positive");
  const auto adj = net.adjacency();
  std::vector<int> label(static_cast<std::size_t>(net.num_nodes), -1);
  std::vector<int> order{root};
  label[static_cast<std::size_t>(root)] = 0;
  for (std::size_t head = 0; head < order.size() && static_cast<int>(order.size()) < count; ++head) {
    for (int v : adj[static_cast<std::size_t>(order[head])]) {
      if (label[static_cast<std::size_t>(v)] >= 0) continue;
      label[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
      order.push_back(v);
      if (static_cast<int>(order.size()) == count) break;
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& [u, v] : net.edges) {
    const int lu = label[static_cast<std::size_t>(u)];
    const int lv = label[static_cast<std::size_t>(v)];
    if (lu >= 0 && lv >= 0) edges.emplace_back(lu, lv);
  }
  return make_network(static_cast<int>(order.size()), edges);
}

Network random_network(int num_nodes, std::uint64_t seed, int extra_edges) {
  if (num_nodes < 1) throw ConfigError("random_network: need at least one node");
  if (extra_edges < 0) extra_edges = num_nodes / 2;
  Rng rng(seed, "graph");
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < num_nodes; ++v) {
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    edges.insert({u, v});
  }
  const auto n = static_cast<std::int64_t>(num_nodes);
  const std::int64_t room = n * (n - 1) / 2 - static_cast<std::int64_t>(edges.size());
  const std::int64_t wanted = std::min<std::int64_t>(extra_edges, room);
  while (static_cast<std::int64_t>(edges.size()) < (n - 1) + wanted) {
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_nodes)));
    const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_nodes)));
    if (u != v) edges.insert({std::min(u, v), std::max(u, v)});
  }
  return make_network(num_nodes, {edges.begin(), edges.end()});
}

// ---------------------------------------------------------------------------
// NUM

NumData generate_num(const Network& net, std::uint64_t seed, const NumOptions& options) {
  if (!(options.pair_density > 0.0 && options.pair_density <= 1.0)) {
    throw ConfigError("generate_num: pair_density must lie in (0, 1]");
  }
  if (!(options.rate_cap > 0.0) || !(options.rho >= 0.0)) {
    throw ConfigError("generate_num: need rate_cap > 0 and rho >= 0");
  }
  const int n = net.num_nodes;
  NumData data;
  data.num_nodes = n;
  data.rate_cap = options.rate_cap;
  data.rho = options.rho;

  Rng rng_d(seed, "d");
  Rng rng_mu(seed, "mu");
  Rng rng_r(seed, "r");
  Rng rng_pairs(seed, "pairs");
  data.mu.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec d(n);
    Vec r(n);
    for (int j = 0; j < n; ++j) {
      d[j] = rng_d.uniform();
      r[j] = rng_r.uniform();
    }
    d[i] = 0.0;
    data.d.push_back(std::move(d));
    data.r.push_back(std::move(r));
    data.mu[i] = rng_mu.uniform();
  }

  for (int i = 0; i < n; ++i) {
    const BfsTree tree = bfs_tree(net, i);
    for (int j = 0; j < n; ++j) {
      // One draw per ordered pair keeps the selection independent of routability.
      const double keep = rng_pairs.uniform();
      if (j == i || !(data.d[static_cast<std::size_t>(i)][j] > 0.0)) continue;
      if (tree.dist[static_cast<std::size_t>(j)] < 0) continue;
      if (keep >= options.pair_density) continue;
      data.pairs.emplace_back(i, j);
      data.paths.push_back(path_from_tree(net, tree, i, j));
    }
  }

  const auto num_edges = static_cast<Eigen::Index>(net.edges.size());
  data.flow = Vec::Zero(num_edges);
  for (std::size_t q = 0; q < data.pairs.size(); ++q) {
    const auto [i, j] = data.pairs[q];
    for (int e : data.paths[q]) data.flow[e] += data.r[static_cast<std::size_t>(i)][j];
  }
  Rng rng_bounds(seed, "bounds");
  data.lower = Vec::Zero(num_edges);
  data.upper = Vec::Zero(num_edges);
  for (Eigen::Index e = 0; e < num_edges; ++e) {
    const double lo = rng_bounds.uniform(0.0, 0.5);
    const double hi = rng_bounds.uniform(0.0, 0.5);
    data.lower[e] = (1.0 - lo) * data.flow[e];
    data.upper[e] = (1.0 + hi) * data.flow[e];
  }
  return data;
}

NumModel build_num_instance(const Network& net, const NumData& data) {
  NumModel model;
  model.data = data;
  if (data.pairs.empty()) throw ConfigError("num: no flow variables");
  const auto num_edges = static_cast<int>(net.edges.size());

  // Variables grouped by source node; pairs are already sorted by (i, j).
  std::map<int, int> block_of;
  for (std::size_t q = 0; q < data.pairs.size(); ++q) {
    const int i = data.pairs[q].first;
    auto [it, inserted] = block_of.emplace(i, static_cast<int>(model.block_nodes.size()));
    if (inserted) {
      model.block_nodes.push_back(i);
      model.block_pairs.emplace_back();
    }
    model.block_pairs[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(q));
  }

  // Pair set per edge, then merge edges with identical sets.
  std::vector<std::vector<int>> users(static_cast<std::size_t>(num_edges));
  for (std::size_t q = 0; q < data.paths.size(); ++q) {
    for (int e : data.paths[q]) users[static_cast<std::size_t>(e)].push_back(static_cast<int>(q));
  }
  std::map<std::vector<int>, int> row_of;
  std::vector<double> row_lo;
  std::vector<double> row_hi;
  std::vector<std::vector<int>> row_users;
  for (int e = 0; e < num_edges; ++e) {
    auto& u = users[static_cast<std::size_t>(e)];
    if (u.empty()) {
      model.dropped_edges.push_back(e);
      continue;
    }
    std::sort(u.begin(), u.end());
    auto [it, inserted] = row_of.emplace(u, static_cast<int>(row_lo.size()));
    if (inserted) {
      row_lo.push_back(data.lower[e]);
      row_hi.push_back(data.upper[e]);
      row_users.push_back(u);
      model.row_edges.push_back({e});
    } else {
      const auto r = static_cast<std::size_t>(it->second);
      row_lo[r] = std::max(row_lo[r], data.lower[e]);
      row_hi[r] = std::min(row_hi[r], data.upper[e]);
      model.row_edges[r].push_back(e);
    }
  }
  if (!model.dropped_edges.empty()) {
    model.warnings.push_back("dropped " + std::to_string(model.dropped_edges.size()) +
                             " edges carrying no flow");
  }
  const int rows = static_cast<int>(row_lo.size());
  for (int r = 0; r < rows; ++r) {
    if (!(row_lo[static_cast<std::size_t>(r)] < row_hi[static_cast<std::size_t>(r)])) {
      throw ConfigError("num: empty link interval after merging");
    }
  }

  // Rows touched by each pair.
  std::vector<std::vector<int>> pair_rows(data.pairs.size());
  for (int r = 0; r < rows; ++r) {
    for (int q : row_users[static_cast<std::size_t>(r)]) {
      pair_rows[static_cast<std::size_t>(q)].push_back(r);
    }
  }

  std::vector<Block> blocks;
  for (std::size_t b = 0; b < model.block_nodes.size(); ++b) {
    const int i = model.block_nodes[b];
    const auto& qs = model.block_pairs[b];
    const auto dim = static_cast<Eigen::Index>(qs.size());
    Vec d(dim);
    Vec r(dim);
    std::set<int> touched;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const int j = data.pairs[static_cast<std::size_t>(qs[static_cast<std::size_t>(k)])].second;
      d[k] = data.d[static_cast<std::size_t>(i)][j];
      r[k] = data.r[static_cast<std::size_t>(i)][j];
      for (int row : pair_rows[static_cast<std::size_t>(qs[static_cast<std::size_t>(k)])]) {
        touched.insert(row);
      }
    }
    Block block;
    block.smooth = std::make_shared<LogUtilityFunction>(d, data.mu[i], r, data.rho);
    block.barrier = CoordinateBarrier::box(static_cast<int>(dim), 0.0, data.rate_cap);
    block.rows.assign(touched.begin(), touched.end());
    block.coupling = Mat::Zero(static_cast<Eigen::Index>(block.rows.size()), dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      for (int row : pair_rows[static_cast<std::size_t>(qs[static_cast<std::size_t>(k)])]) {
        const auto pos = std::lower_bound(block.rows.begin(), block.rows.end(), row) -
                         block.rows.begin();
        block.coupling(pos, k) = 1.0;
      }
    }
    blocks.push_back(std::move(block));
  }

  Vec lo = Eigen::Map<const Vec>(row_lo.data(), rows);
  Vec hi = Eigen::Map<const Vec>(row_hi.data(), rows);
  model.instance.emplace(rows, std::move(blocks), CompositeTerm::box(lo, hi));
  const int rank = coupling_rank(*model.instance);
  if (rank < rows) {
    throw ConfigError("num: routing matrix is rank deficient (rank " + std::to_string(rank) +
                      " < " + std::to_string(rows) + ")");
  }
  return model;
}

double num_source_objective(const NumModel& model, const PrimalPoint& x) {
  const NumData& data = model.data;
  double total = 0.0;
  for (std::size_t b = 0; b < model.block_nodes.size(); ++b) {
    const int i = model.block_nodes[b];
    const Vec& xb = x.blocks[b];
    double dx = data.mu[i];
    double sq = 0.0;
    for (std::size_t k = 0; k < model.block_pairs[b].size(); ++k) {
      const int j = data.pairs[static_cast<std::size_t>(model.block_pairs[b][k])].second;
      const auto kk = static_cast<Eigen::Index>(k);
      dx += data.d[static_cast<std::size_t>(i)][j] * xb[kk];
      const double diff = xb[kk] - data.r[static_cast<std::size_t>(i)][j];
      sq += diff * diff;
    }
    total += std::log(dx) - 0.5 * data.rho * sq;
  }
  return total;
}

// ---------------------------------------------------------------------------
// DSL

void DslData::validate() const {
  if (m < 1 || M < 1) throw ConfigError("dsl: need m >= 1 and M >= 1");
  const auto mm = static_cast<Eigen::Index>(m);
  const auto count = static_cast<std::size_t>(M);
  if (a.size() != count || c.size() != count || g.size() != count || H.size() != count) {
    throw ConfigError("dsl: per-channel data must have M entries");
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (a[i].size() != mm || c[i].size() != mm || g[i].size() != mm || H[i].rows() != mm ||
        H[i].cols() != mm) {
      throw ConfigError("dsl: channel " + std::to_string(i) + " has wrong shapes");
    }
    if ((c[i].array() < 0.0).any()) throw ConfigError("dsl: c must be nonnegative");
  }
  if (b.size() != mm) throw ConfigError("dsl: b must have m entries");
  if (!(L > 0.0)) throw ConfigError("dsl: L must be positive");
}

DslData generate_dsl(int m, int M, std::uint64_t seed) {
  if (m < 1 || M < 1) throw ConfigError("generate_dsl: need m >= 1 and M >= 1");
  DslData data;
  data.m = m;
  data.M = M;
  data.L = 1.0;
  Rng rng_a(seed, "dsl.a");
  Rng rng_c(seed, "dsl.c");
  Rng rng_g(seed, "dsl.g");
  Rng rng_h(seed, "dsl.H");
  for (int i = 0; i < M; ++i) {
    Vec a(m);
    Vec c(m);
    Vec g(m);
    Mat h(m, m);
    for (int u = 0; u < m; ++u) {
      a[u] = rng_a.uniform(0.0, 0.5);
      c[u] = rng_c.uniform(0.5, 1.5);
      g[u] = rng_g.uniform(0.05, 0.15);
      for (int v = 0; v < m; ++v) {
        h(u, v) = u == v ? 1.0 + rng_h.uniform() : rng_h.uniform(0.0, 0.1);
      }
    }
    data.a.push_back(std::move(a));
    data.c.push_back(std::move(c));
    data.g.push_back(std::move(g));
    data.H.push_back(std::move(h));
  }
  data.b = Vec::Constant(m, 0.3 * M * data.L);
  return data;
}

ProblemInstance build_dsl_instance(const DslData& data) {
  data.validate();
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(data.M));
  std::vector<int> rows(static_cast<std::size_t>(data.m));
  for (int u = 0; u < data.m; ++u) rows[static_cast<std::size_t>(u)] = u;
  for (std::size_t i = 0; i < static_cast<std::size_t>(data.M); ++i) {
    Block block;
    auto fn = std::make_shared<LogRateFunction>(data.a[i], data.c[i], data.H[i], data.g[i]);
    block.barrier = CoordinateBarrier::box(data.m, 0.0, data.L);
    if (!fn->in_domain(block.barrier.center())) {
      throw ConfigError("dsl: channel " + std::to_string(i) + " has an empty interior");
    }
    block.smooth = std::move(fn);
    block.rows = rows;
    block.coupling = Mat::Identity(data.m, data.m);
    blocks.push_back(std::move(block));
  }
  return ProblemInstance(data.m, std::move(blocks), CompositeTerm::upper_bound(data.b));
}

double dsl_source_objective(const DslData& data, const PrimalPoint& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(data.M); ++i) {
    const Vec s = data.H[i] * x.blocks[i] + data.g[i];
    total += data.a[i].dot(x.blocks[i]) - data.c[i].dot(s.array().log().matrix());
  }
  return total;
}

}  // namespace ipld
