#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "rewire/graph.hpp"
#include "rewire/objectives.hpp"

namespace rewire {

/// Sub-step within one rewiring operation (t mod 3).
enum class Phase { SelectBase = 0, SelectAddition = 1, SelectRemoval = 2 };

/// One rewiring: add (base, add), then remove (base, remove).
struct Rewiring {
  Node base = 0;
  Node add = 0;
  Node remove = 0;

  friend auto operator<=>(const Rewiring&, const Rewiring&) = default;
};

struct RewireState {
  Graph graph;
  std::optional<Node> base;
  std::optional<Node> addition;
  int t = 0;
  int budget = 1;      // rewiring operations in the episode
  int remaining = 1;   // operations not yet completed
  double f0 = 0.0;     // objective of the initial graph
  bool terminal = false;
  std::shared_ptr<const Graph> initial;

  Phase phase() const { return static_cast<Phase>(t % 3); }
  int horizon() const { return 3 * budget; }
};

struct StepOutcome {
  RewireState next_state;
  double reward = 0.0;
  bool terminal = false;
};

struct EnvConfig {
  ObjectiveConfig objective;
  double disconnection_penalty = -10.0;
};

/// b = max(1, round-half-up(fraction * m)).
int budget_for(std::size_t num_edges, double budget_fraction);

/// Legal actions for the state's phase, ascending by node id:
///   base:     0 < degree(v) < n - 1
///   addition: v != base and (base, v) not an edge
///   removal:  (base, v) an edge and v != addition
std::vector<Node> valid_actions(const RewireState& s);

/// Every rewiring that is legal from `g`, sorted lexicographically.
std::vector<Rewiring> enumerate_rewirings(const Graph& g);

/// Applies one rewiring in place. Throws std::invalid_argument if illegal.
void apply_rewiring(Graph& g, const Rewiring& r);

/// Deterministic three-phase rewiring MDP with a terminal-only reward.
class RewireEnv {
 public:
  explicit RewireEnv(EnvConfig config) : config_(config) {}

  const EnvConfig& config() const { return config_; }

  /// Throws std::invalid_argument if g0 is disconnected or the fraction is
  /// outside (0, 1]. A graph with no legal base node gives a state that is
  /// already terminal.
  RewireState reset(const Graph& g0, double budget_fraction) const;

  /// Throws std::invalid_argument for illegal actions or terminal states.
  StepOutcome step(const RewireState& s, Node action) const;

  /// Terminal reward of a final graph: scaled gain if connected, else the penalty.
  double terminal_reward(const RewireState& final_state) const;

 private:
  EnvConfig config_;
};

struct TraceRecord {
  int t = 0;
  int phase = 0;
  Node action = 0;
  double reward = 0.0;
};

struct EpisodeResult {
  Graph final_graph;
  double delta = 0.0;      // F(G_T) - F(G_0); 0 when disconnected
  bool connected = true;
  double total_reward = 0.0;
  std::vector<TraceRecord> trace;
};

using ActionChooser = std::function<Node(const RewireState&, std::span<const Node>)>;

/// Runs one full episode from g0, asking `choose` for every sub-step action.
EpisodeResult run_episode(const RewireEnv& env, const Graph& g0, double budget_fraction, const ActionChooser& choose);

/// CSV with header `t,phase,action,reward`.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);

}  // namespace rewire
