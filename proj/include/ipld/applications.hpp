#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipld/problem.hpp"

namespace ipld {

/// Undirected simple graph on nodes 0..num_nodes-1.
struct Network {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  ///< (u, v) with u < v

  /// Index of edge {u, v}, or -1.
  int edge_index(int u, int v) const;
  std::vector<std::vector<int>> adjacency() const;
};

/// Builds a Network from arbitrary endpoint pairs: self-loops and duplicate
/// edges are dropped, endpoints are kept as given (ids must be < num_nodes).
Network make_network(int num_nodes, const std::vector<std::pair<int, int>>& edges);

/// BFS distances and predecessors from `source` (-1 where unreachable).
/// The predecessor of v is its smallest-index neighbor one step closer.
struct BfsTree {
  std::vector<int> dist;
  std::vector<int> pred;
};
BfsTree bfs_tree(const Network& net, int source);

/// Shortest path from i to j as a list of edge indices in walk order;
/// empty when i == j. Throws ConfigError when j is unreachable.
std::vector<int> shortest_path(const Network& net, int i, int j);
std::vector<std::vector<int>> shortest_paths(const Network& net,
                                             const std::vector<std::pair<int, int>>& pairs);

/// Induced subgraph on the first `count` nodes reached by BFS from `root`,
/// relabelled in visiting order.
Network bfs_ball(const Network& net, int root, int count);

/// Connected random graph: a random recursive spanning tree plus
/// `extra_edges` distinct random chords.
Network random_network(int num_nodes, std::uint64_t seed, int extra_edges = -1);

// ---------------------------------------------------------------------------
// Network utility maximization

struct NumOptions {
  double pair_density = 1.0;  ///< probability of keeping each routable pair
  double rate_cap = 1.0;      ///< M
  double rho = 0.01;
};

struct NumData {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> pairs;  ///< flow variables (i, j), sorted
  std::vector<std::vector<int>> paths;     ///< edge indices per pair
  std::vector<Vec> d;                      ///< d_i over all nodes, d_ii = 0
  Vec mu;
  std::vector<Vec> r;  ///< r_i over all nodes
  Vec lower;           ///< L_e per network edge (0 for flowless edges)
  Vec upper;           ///< U_e per network edge
  Vec flow;            ///< b_bar = sum_i A_i r_i per network edge
  double rate_cap = 1.0;
  double rho = 0.01;
};

NumData generate_num(const Network& net, std::uint64_t seed, const NumOptions& options = {});

/// ProblemInstance with its variable and row bookkeeping.
struct NumModel {
  NumData data;
  std::vector<int> block_nodes;                 ///< source node of each block
  std::vector<std::vector<int>> block_pairs;    ///< pair indices per block
  std::vector<std::vector<int>> row_edges;      ///< network edges merged into each row
  std::vector<int> dropped_edges;               ///< edges carrying no flow
  std::vector<std::string> warnings;
  std::optional<ProblemInstance> instance;

  const ProblemInstance& problem() const { return *instance; }
};

/// Rows of A are the edges that carry flow; edges with identical pair sets
/// are merged into one row with the intersection of their intervals.
/// Throws ConfigError when the merged A is rank deficient.
NumModel build_num_instance(const Network& net, const NumData& data);

/// sum_i [ln(d_i^T x_i + mu_i) - (rho/2) ||x_i - r_i||^2], the maximized
/// utility; equals minus the instance objective.
double num_source_objective(const NumModel& model, const PrimalPoint& x);

// ---------------------------------------------------------------------------
// DSL spectrum management

struct DslData {
  int m = 0;  ///< users (block dimension)
  int M = 0;  ///< channels (blocks)
  std::vector<Vec> a;
  std::vector<Vec> c;
  std::vector<Vec> g;
  std::vector<Mat> H;
  Vec b;
  double L = 1.0;

  /// Throws ConfigError on shape or sign violations.
  void validate() const;
};

DslData generate_dsl(int m, int M, std::uint64_t seed);

/// Blocks g_i(x_i) = a_i^T x_i - c_i^T ln(H_i x_i + g_i) on [0, L]^m,
/// A = [I ... I], composite = indicator of (-inf, b].
ProblemInstance build_dsl_instance(const DslData& data);

/// sum_i [a_i^T x_i - c_i^T ln(H_i x_i + g_i)].
double dsl_source_objective(const DslData& data, const PrimalPoint& x);

}  // namespace ipld
