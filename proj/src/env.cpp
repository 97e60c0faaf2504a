#include "rewire/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rewire {

int budget_for(std::size_t num_edges, double budget_fraction) {
  const double raw = budget_fraction * static_cast<double>(num_edges);
  const int rounded = static_cast<int>(std::floor(raw + 0.5));
  return std::max(1, rounded);
}

std::vector<Node> valid_actions(const RewireState& s) {
  const Graph& g = s.graph;
  const int n = g.num_nodes();
  std::vector<Node> out;
  if (s.terminal) return out;
  switch (s.phase()) {
    case Phase::SelectBase:
      for (Node v = 0; v < n; ++v) {
        const int k = g.degree(v);
        if (k > 0 && k < n - 1) out.push_back(v);
      }
      break;
    case Phase::SelectAddition: {
      const Node a1 = s.base.value();
      for (Node v = 0; v < n; ++v) {
        if (v != a1 && !g.has_edge(a1, v)) out.push_back(v);
      }
      break;
    }
    case Phase::SelectRemoval: {
      const Node a1 = s.base.value();
      const Node a2 = s.addition.value();
      for (Node v : g.neighbors(a1)) {
        if (v != a2) out.push_back(v);
      }
      break;
    }
  }
  return out;
}

std::vector<Rewiring> enumerate_rewirings(const Graph& g) {
  std::vector<Rewiring> out;
  const int n = g.num_nodes();
  for (Node base = 0; base < n; ++base) {
    const int k = g.degree(base);
    if (k <= 0 || k >= n - 1) continue;
    for (Node add = 0; add < n; ++add) {
      if (add == base || g.has_edge(base, add)) continue;
      // The removal phase sees the graph after the addition, so its choices
      // are the base's current neighbours; `add` itself is excluded.
      for (Node remove : g.neighbors(base)) out.push_back({base, add, remove});
    }
  }
  return out;
}

void apply_rewiring(Graph& g, const Rewiring& r) {
  const int k = g.degree(r.base);
  if (k <= 0 || k >= g.num_nodes() - 1) throw std::invalid_argument("apply_rewiring: illegal base node");
  if (!g.has_edge(r.base, r.remove)) throw std::invalid_argument("apply_rewiring: removal is not an edge");
  g.add_edge(r.base, r.add);
  g.remove_edge(r.base, r.remove);
}

RewireState RewireEnv::reset(const Graph& g0, double budget_fraction) const {
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    throw std::invalid_argument("reset: budget fraction must lie in (0, 1]");
  }
  if (!is_connected(g0)) throw std::invalid_argument("reset: initial graph is disconnected");
  RewireState s;
  s.graph = g0;
  s.budget = budget_for(g0.num_edges(), budget_fraction);
  s.remaining = s.budget;
  s.f0 = evaluate(config_.objective, g0);
  s.initial = std::make_shared<const Graph>(g0);
  s.terminal = valid_actions(s).empty();
  return s;
}

double RewireEnv::terminal_reward(const RewireState& final_state) const {
  if (!is_connected(final_state.graph)) return config_.disconnection_penalty;
  return config_.objective.reward_scale * (evaluate(config_.objective, final_state.graph) - final_state.f0);
}

StepOutcome RewireEnv::step(const RewireState& s, Node action) const {
  if (s.terminal) throw std::invalid_argument("step: episode already terminated");
  const auto legal = valid_actions(s);
  if (!std::binary_search(legal.begin(), legal.end(), action)) {
    throw std::invalid_argument("step: illegal action " + std::to_string(action) + " in phase " +
                                std::to_string(static_cast<int>(s.phase())));
  }

  StepOutcome out{s, 0.0, false};
  RewireState& next = out.next_state;
  switch (s.phase()) {
    case Phase::SelectBase:
      next.base = action;
      break;
    case Phase::SelectAddition:
      next.addition = action;
      next.graph.add_edge(*s.base, action);
      break;
    case Phase::SelectRemoval:
      next.graph.remove_edge(*s.base, action);
      next.base.reset();
      next.addition.reset();
      --next.remaining;
      break;
  }
  ++next.t;

  const bool horizon_reached = next.t == next.horizon();
  // No legal base node left mid-episode: the episode ends early and is scored as final.
  const bool stuck = !horizon_reached && next.phase() == Phase::SelectBase && valid_actions(next).empty();
  if (horizon_reached || stuck) {
    next.terminal = true;
    out.terminal = true;
    out.reward = terminal_reward(next);
  }
  return out;
}

EpisodeResult run_episode(const RewireEnv& env, const Graph& g0, double budget_fraction, const ActionChooser& choose) {
  RewireState s = env.reset(g0, budget_fraction);
  EpisodeResult result;
  while (!s.terminal) {
    const auto actions = valid_actions(s);
    const Node a = choose(s, actions);
    StepOutcome out = env.step(s, a);
    result.trace.push_back({s.t, static_cast<int>(s.phase()), a, out.reward});
    result.total_reward += out.reward;
    s = std::move(out.next_state);
  }
  result.connected = is_connected(s.graph);
  if (result.connected && s.t > 0) {
    result.delta = evaluate(env.config().objective, s.graph) - s.f0;
  }
  result.final_graph = std::move(s.graph);
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << "t,phase,action,reward\n";
  for (const auto& r : trace) out << r.t << ',' << r.phase << ',' << r.action << ',' << r.reward << '\n';
}

}  // namespace rewire
