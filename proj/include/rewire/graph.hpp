#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rewire {

using Node = int;

/// Unordered node pair, stored canonically with first < second.
struct Edge {
  Node first = 0;
  Node second = 0;

  Edge() = default;
  Edge(Node a, Node b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph over nodes 0..n-1.
///
/// Adjacency lists are kept sorted, so two graphs with the same edge set have
/// identical internal layout and every traversal order is deterministic.
/// `add_edge`/`remove_edge` mutate in place; a Graph value has a single owner
/// while it is being edited and is freely shareable read-only afterwards.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  static Graph from_edges(int n, std::span<const Edge> edges);

  int num_nodes() const { return static_cast<int>(adj_.size()); }
  std::size_t num_edges() const { return num_edges_; }
  int degree(Node v) const { return static_cast<int>(adj_.at(v).size()); }
  std::span<const Node> neighbors(Node v) const { return adj_.at(v); }
  bool has_edge(Node i, Node j) const;

  /// Throws std::invalid_argument on self-loops, duplicates or bad ids.
  void add_edge(Node i, Node j);
  /// Throws std::invalid_argument if (i, j) is not an edge.
  void remove_edge(Node i, Node j);

  /// Canonical edge list, lexicographically sorted.
  std::vector<Edge> edges() const;
  std::vector<int> degrees() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_edges_ == b.num_edges_ && a.adj_ == b.adj_;
  }

 private:
  void check_node(Node v) const;

  std::vector<std::vector<Node>> adj_;
  std::size_t num_edges_ = 0;
};

struct ComponentLabeling {
  int count = 0;
  std::vector<int> label;
};

/// Labels are assigned in order of the smallest node id in each component.
ComponentLabeling connected_components(const Graph& g);
bool is_connected(const Graph& g);

/// q(k) for k = 0..n-1.
std::vector<double> degree_distribution(const Graph& g);

/// Hop distances from `source`; -1 for unreachable nodes.
std::vector<int> bfs_distances(const Graph& g, Node source);

/// Longest shortest path; requires a connected graph.
int diameter(const Graph& g);

/// Subgraph induced by `keep` (any order), relabelled to 0..k-1 in ascending
/// order of the original ids.
Graph induced_subgraph(const Graph& g, std::span<const Node> keep);

/// Nodes of the largest component (ties broken by smallest label), ascending.
std::vector<Node> largest_component(const Graph& g);

/// Graph whose node `perm[v]` corresponds to node `v` of `g`.
Graph relabel(const Graph& g, std::span<const Node> perm);

/// Power iteration failed to reach tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct PowerIterationOptions {
  double tolerance = 1e-10;
  long max_iterations = 100000;
};

/// Spectral radius of the adjacency matrix by power iteration.
///
/// Iterates on A + I from the normalized all-ones vector; the shift makes the
/// Perron eigenvalue strictly dominant even for bipartite graphs, whose
/// spectrum is symmetric about zero. Convergence is declared when successive
/// Rayleigh quotients of A differ by less than `tolerance`.
double largest_eigenvalue(const Graph& g, const PowerIterationOptions& opts = {});

/// `n <count>` header followed by one canonical `i j` line per edge.
std::string serialize_edge_list(const Graph& g);
/// Throws std::invalid_argument with a line number on malformed input.
Graph parse_edge_list(std::string_view text);

Graph read_edge_list_file(const std::string& path);
void write_edge_list_file(const Graph& g, const std::string& path);

}  // namespace rewire
