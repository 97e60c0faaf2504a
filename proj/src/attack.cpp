#include "rewire/attack.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace rewire {

namespace {

std::uint64_t edge_key(Node a, Node b) {
  const Edge e(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.first)) << 32) |
         static_cast<std::uint32_t>(e.second);
}

}  // namespace

LocalMap build_local_map(const Graph& g0, Node entry, int hops) {
  if (entry < 0 || entry >= g0.num_nodes()) throw std::invalid_argument("build_local_map: entry out of range");
  const auto dist = bfs_distances(g0, entry);
  LocalMap map;
  map.entry = entry;
  std::vector<char> inside(dist.size(), 0);
  for (Node v = 0; v < g0.num_nodes(); ++v) {
    if (dist[static_cast<std::size_t>(v)] >= 0 && dist[static_cast<std::size_t>(v)] <= hops) {
      map.nodes.push_back(v);
      inside[static_cast<std::size_t>(v)] = 1;
    }
  }
  for (const Edge& e : g0.edges()) {
    if (inside[static_cast<std::size_t>(e.first)] && inside[static_cast<std::size_t>(e.second)]) map.edges.push_back(e);
  }
  return map;
}

std::vector<Node> newly_unreachable(const Graph& g_star, const LocalMap& map) {
  Graph surviving(g_star.num_nodes());
  for (const Edge& e : map.edges) {
    if (g_star.has_edge(e.first, e.second)) surviving.add_edge(e.first, e.second);
  }
  const auto dist = bfs_distances(surviving, map.entry);
  std::vector<Node> out;
  for (Node v : map.nodes) {
    if (v != map.entry && dist[static_cast<std::size_t>(v)] < 0) out.push_back(v);
  }
  return out;
}

long forward_random_walk_cost(const Graph& g_star, Node entry, Node target, std::span<const Edge> known_edges,
                              Rng& rng, long max_steps) {
  if (entry == target) throw std::invalid_argument("forward_random_walk_cost: entry equals target");
  if (g_star.degree(entry) == 0) throw std::invalid_argument("forward_random_walk_cost: entry is isolated");
  if (max_steps <= 0) max_steps = 1000000L * g_star.num_nodes();

  std::unordered_set<std::uint64_t> visited;
  for (const Edge& e : known_edges) visited.insert(edge_key(e.first, e.second));
  long cost = 0;
  auto charge = [&](Node a, Node b) {
    if (visited.insert(edge_key(a, b)).second) ++cost;
  };

  std::vector<Node> options;
  auto draw_next = [&](Node current, Node previous) {
    options.clear();
    for (Node w : g_star.neighbors(current)) {
      if (w != previous) options.push_back(w);
    }
    if (options.empty()) return previous;
    return options[uniform_index(rng, options.size())];
  };

  Node previous = entry;
  Node current = entry;
  Node next = draw_next(current, entry);
  long steps = 0;
  while (next != target) {
    if (++steps > max_steps) throw WalkLimitError("forward random walk exceeded step limit", cost);
    charge(current, next);
    if (g_star.degree(next) == 1) {
      previous = next;
    } else {
      previous = current;
      current = next;
    }
    next = draw_next(current, previous);
  }
  // The last edge is charged without being recorded, as the walk ends here.
  if (!visited.count(edge_key(current, next))) ++cost;
  return cost;
}

AttackReport evaluate_rewiring(const Graph& g0, const Graph& g_star, EntryRule rule, std::uint64_t seed,
                               int workers) {
  if (g0.num_nodes() != g_star.num_nodes()) throw std::invalid_argument("evaluate_rewiring: node count mismatch");
  if (!is_connected(g_star)) throw std::invalid_argument("evaluate_rewiring: rewired graph is disconnected");
  const int n = g0.num_nodes();
  const int count = rule == EntryRule::Synthetic ? std::min(n, 30) : n;

  std::vector<Node> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng entry_rng = make_rng(seed, 0);
  std::shuffle(order.begin(), order.end(), entry_rng);
  order.resize(static_cast<std::size_t>(count));

  AttackReport report;
  report.entries.resize(order.size());
  parallel_for(order.size(), workers, [&](std::size_t i) {
    EntryReport& er = report.entries[i];
    er.entry = order[i];
    const LocalMap map = build_local_map(g0, er.entry);
    for (Node target : newly_unreachable(g_star, map)) {
      Rng rng = make_rng(mix_seed(seed, 1 + i), static_cast<std::uint64_t>(target));
      const long cost = forward_random_walk_cost(g_star, er.entry, target, map.edges, rng);
      er.walks.push_back({er.entry, target, cost});
      er.total += cost;
    }
    er.normalized = static_cast<double>(er.total) / n;
  });

  std::vector<double> normalized;
  std::vector<double> totals;
  for (const auto& er : report.entries) {
    normalized.push_back(er.normalized);
    totals.push_back(static_cast<double>(er.total));
  }
  report.normalized = summarize(normalized);
  report.total = summarize(totals);
  return report;
}

void write_walks_csv(std::ostream& out, const AttackReport& report) {
  out << "entry,target,cost\n";
  for (const auto& er : report.entries) {
    for (const auto& w : er.walks) out << w.entry << ',' << w.target << ',' << w.cost << '\n';
  }
}

}  // namespace rewire
