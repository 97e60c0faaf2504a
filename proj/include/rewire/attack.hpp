#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "rewire/graph.hpp"
#include "rewire/rng.hpp"
#include "rewire/stats.hpp"

namespace rewire {

/// Attacker's prior knowledge around an entry node.
struct LocalMap {
  Node entry = 0;
  std::vector<Node> nodes;  // ascending, includes entry
  std::vector<Edge> edges;  // edges of the original graph among `nodes`
};

/// Nodes within `hops` of `entry` in g0 and every g0 edge between them.
LocalMap build_local_map(const Graph& g0, Node entry, int hops = 2);

/// Map nodes (other than the entry) that the entry can no longer reach using
/// only map edges that survive in g_star.
std::vector<Node> newly_unreachable(const Graph& g_star, const LocalMap& map);

class WalkLimitError : public std::runtime_error {
 public:
  WalkLimitError(const std::string& what, long partial_cost) : std::runtime_error(what), partial_cost_(partial_cost) {}
  long partial_cost() const { return partial_cost_; }

 private:
  long partial_cost_;
};

/// Forward random walk from `entry` until `target` is drawn as the next node.
///
/// The walker picks uniformly among the current node's neighbours other than
/// the previous node. A drawn neighbour of degree 1 is a dead end: the walker
/// stays put and that neighbour becomes "previous", so the next draw excludes
/// it. If the only neighbour is the previous node, the walker steps back.
/// Each traversed edge not in `known_edges` and not yet seen costs 1; the
/// final edge into the target is charged the same way.
/// `max_steps` <= 0 means 10^6 * n. Throws WalkLimitError past the limit.
long forward_random_walk_cost(const Graph& g_star, Node entry, Node target, std::span<const Edge> known_edges,
                              Rng& rng, long max_steps = 0);

enum class EntryRule {
  Synthetic,  // min(n, 30) entries
  AllNodes,   // every node is an entry
};

struct WalkRecord {
  Node entry = 0;
  Node target = 0;
  long cost = 0;
};

struct EntryReport {
  Node entry = 0;
  std::vector<WalkRecord> walks;  // one per newly unreachable target
  long total = 0;
  double normalized = 0.0;  // total / n
};

struct AttackReport {
  std::vector<EntryReport> entries;
  Summary normalized;  // over entries
  Summary total;       // over entries
};

/// Samples entries without replacement, builds each 2-hop map on g0, and
/// walks once to each newly unreachable target on g_star. Walk (entry i,
/// target) draws from its own substream of `seed`. Throws
/// std::invalid_argument if g_star is disconnected or sizes differ.
AttackReport evaluate_rewiring(const Graph& g0, const Graph& g_star, EntryRule rule, std::uint64_t seed,
                               int workers = 1);

/// Header `entry,target,cost`.
void write_walks_csv(std::ostream& out, const AttackReport& report);

}  // namespace rewire
