#include "rewire/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>

namespace rewire {

Graph::Graph(int n) {
  if (n < 1) throw std::invalid_argument("Graph: node count must be >= 1");
  adj_.resize(static_cast<std::size_t>(n));
}

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
  Graph g(n);
  for (const Edge& e : edges) g.add_edge(e.first, e.second);
  return g;
}

void Graph::check_node(Node v) const {
  if (v < 0 || v >= num_nodes()) {
    throw std::invalid_argument("node id " + std::to_string(v) + " out of range [0, " +
                                std::to_string(num_nodes()) + ")");
  }
}

bool Graph::has_edge(Node i, Node j) const {
  if (i < 0 || j < 0 || i >= num_nodes() || j >= num_nodes()) return false;
  const auto& a = adj_[static_cast<std::size_t>(i)];
  return std::binary_search(a.begin(), a.end(), j);
}

void Graph::add_edge(Node i, Node j) {
  check_node(i);
  check_node(j);
  if (i == j) throw std::invalid_argument("self-loop (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  auto& ai = adj_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(ai.begin(), ai.end(), j);
  if (it != ai.end() && *it == j) {
    throw std::invalid_argument("duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  ai.insert(it, j);
  auto& aj = adj_[static_cast<std::size_t>(j)];
  aj.insert(std::lower_bound(aj.begin(), aj.end(), i), i);
  ++num_edges_;
}

void Graph::remove_edge(Node i, Node j) {
  check_node(i);
  check_node(j);
  auto& ai = adj_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(ai.begin(), ai.end(), j);
  if (it == ai.end() || *it != j) {
    throw std::invalid_argument("missing edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  ai.erase(it);
  auto& aj = adj_[static_cast<std::size_t>(j)];
  aj.erase(std::lower_bound(aj.begin(), aj.end(), i));
  --num_edges_;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (Node i = 0; i < num_nodes(); ++i) {
    for (Node j : adj_[static_cast<std::size_t>(i)]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(adj_.size());
  for (std::size_t v = 0; v < adj_.size(); ++v) d[v] = static_cast<int>(adj_[v].size());
  return d;
}

ComponentLabeling connected_components(const Graph& g) {
  const int n = g.num_nodes();
  ComponentLabeling out;
  out.label.assign(static_cast<std::size_t>(n), -1);
  std::vector<Node> stack;
  for (Node s = 0; s < n; ++s) {
    if (out.label[static_cast<std::size_t>(s)] >= 0) continue;
    const int c = out.count++;
    out.label[static_cast<std::size_t>(s)] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      const Node v = stack.back();
      stack.pop_back();
      for (Node w : g.neighbors(v)) {
        if (out.label[static_cast<std::size_t>(w)] < 0) {
          out.label[static_cast<std::size_t>(w)] = c;
          stack.push_back(w);
        }
      }
    }
  }
  return out;
}

bool is_connected(const Graph& g) {
  if (g.num_nodes() == 0) return false;
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

std::vector<double> degree_distribution(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<double> q(static_cast<std::size_t>(n), 0.0);
  for (Node v = 0; v < n; ++v) q[static_cast<std::size_t>(g.degree(v))] += 1.0;
  for (double& x : q) x /= n;
  return q;
}

std::vector<int> bfs_distances(const Graph& g, Node source) {
  std::vector<int> dist(static_cast<std::size_t>(g.num_nodes()), -1);
  std::queue<Node> frontier;
  dist.at(static_cast<std::size_t>(source)) = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const Node v = frontier.front();
    frontier.pop();
    for (Node w : g.neighbors(v)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

int diameter(const Graph& g) {
  int best = 0;
  for (Node s = 0; s < g.num_nodes(); ++s) {
    for (int d : bfs_distances(g, s)) {
      if (d < 0) throw std::invalid_argument("diameter: graph is disconnected");
      best = std::max(best, d);
    }
  }
  return best;
}

Graph induced_subgraph(const Graph& g, std::span<const Node> keep) {
  std::vector<Node> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty()) throw std::invalid_argument("induced_subgraph: empty node set");
  std::vector<int> index(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t k = 0; k < sorted.size(); ++k) index.at(static_cast<std::size_t>(sorted[k])) = static_cast<int>(k);
  Graph out(static_cast<int>(sorted.size()));
  for (const Edge& e : g.edges()) {
    const int a = index[static_cast<std::size_t>(e.first)];
    const int b = index[static_cast<std::size_t>(e.second)];
    if (a >= 0 && b >= 0) out.add_edge(a, b);
  }
  return out;
}

std::vector<Node> largest_component(const Graph& g) {
  const auto comp = connected_components(g);
  std::vector<int> sizes(static_cast<std::size_t>(comp.count), 0);
  for (int c : comp.label) ++sizes[static_cast<std::size_t>(c)];
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<Node> nodes;
  for (Node v = 0; v < g.num_nodes(); ++v) {
    if (comp.label[static_cast<std::size_t>(v)] == best) nodes.push_back(v);
  }
  return nodes;
}

Graph relabel(const Graph& g, std::span<const Node> perm) {
  if (static_cast<int>(perm.size()) != g.num_nodes()) throw std::invalid_argument("relabel: permutation size mismatch");
  Graph out(g.num_nodes());
  for (const Edge& e : g.edges()) {
    out.add_edge(perm[static_cast<std::size_t>(e.first)], perm[static_cast<std::size_t>(e.second)]);
  }
  return out;
}

double largest_eigenvalue(const Graph& g, const PowerIterationOptions& opts) {
  const int n = g.num_nodes();
  if (g.num_edges() == 0) return 0.0;

  std::vector<double> x(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> ax(static_cast<std::size_t>(n));
  auto multiply = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (Node v = 0; v < n; ++v) {
      double s = 0.0;
      for (Node w : g.neighbors(v)) s += in[static_cast<std::size_t>(w)];
      out[static_cast<std::size_t>(v)] = s;
    }
  };

  multiply(x, ax);
  double rayleigh = std::inner_product(x.begin(), x.end(), ax.begin(), 0.0);
  for (long it = 0; it < opts.max_iterations; ++it) {
    // x <- (A + I) x / ||(A + I) x||
    double norm = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
      x[v] += ax[v];
      norm += x[v] * x[v];
    }
    norm = std::sqrt(norm);
    for (double& xv : x) xv /= norm;
    multiply(x, ax);
    const double next = std::inner_product(x.begin(), x.end(), ax.begin(), 0.0);
    const double change = std::abs(next - rayleigh);
    rayleigh = next;
    if (change < opts.tolerance) return rayleigh;
  }
  double residual = 0.0;
  for (std::size_t v = 0; v < x.size(); ++v) residual += (ax[v] - rayleigh * x[v]) * (ax[v] - rayleigh * x[v]);
  throw ConvergenceError("largest_eigenvalue: power iteration did not converge", std::sqrt(residual));
}

std::string serialize_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "n " << g.num_nodes();
  for (const Edge& e : g.edges()) out << '\n' << e.first << ' ' << e.second;
  return out.str();
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw std::invalid_argument("edge list line " + std::to_string(line) + ": " + msg);
}

bool parse_int(std::string_view tok, int& out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) toks.push_back(line.substr(start, i - start));
  }
  return toks;
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::optional<Graph> g;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].starts_with('#')) continue;
    if (!g) {
      int n = 0;
      if (toks.size() != 2 || toks[0] != "n" || !parse_int(toks[1], n) || n < 1) {
        parse_fail(line_no, "expected header 'n <count>'");
      }
      g.emplace(n);
      continue;
    }
    int i = 0;
    int j = 0;
    if (toks.size() != 2 || !parse_int(toks[0], i) || !parse_int(toks[1], j)) {
      parse_fail(line_no, "expected 'i j'");
    }
    try {
      g->add_edge(i, j);
    } catch (const std::invalid_argument& e) {
      parse_fail(line_no, e.what());
    }
  }
  if (!g) throw std::invalid_argument("edge list: missing header");
  return std::move(*g);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str());
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_edge_list(g) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace rewire
