#include "rewire/baselines.hpp"

#include <stdexcept>

namespace rewire {

EpisodeResult random_episode(const RewireEnv& env, const Graph& g0, double budget_fraction, Rng& rng) {
  return run_episode(env, g0, budget_fraction, [&](const RewireState&, std::span<const Node> actions) {
    return actions[uniform_index(rng, actions.size())];
  });
}

std::optional<GreedyStep> best_rewiring(const Graph& g, const ObjectiveConfig& objective, const Deadline& deadline) {
  std::optional<GreedyStep> best;
  Graph work = g;
  long checked = 0;
  for (const Rewiring& r : enumerate_rewirings(g)) {
    if (deadline && (++checked & 63) == 0 && std::chrono::steady_clock::now() > *deadline) {
      throw TimeoutError("greedy: deadline exceeded");
    }
    work.add_edge(r.base, r.add);
    work.remove_edge(r.base, r.remove);
    if (is_connected(work)) {
      const double value = evaluate(objective, work);
      if (!best || value > best->value) best = GreedyStep{r, value};
    }
    work.add_edge(r.base, r.remove);
    work.remove_edge(r.base, r.add);
  }
  return best;
}

GreedyResult greedy_episode(const Graph& g0, double budget_fraction, const ObjectiveConfig& objective,
                            const Deadline& deadline) {
  if (!is_connected(g0)) throw std::invalid_argument("greedy_episode: initial graph is disconnected");
  const double f0 = evaluate(objective, g0);
  const int budget = budget_for(g0.num_edges(), budget_fraction);
  GreedyResult out;
  out.final_graph = g0;
  for (int op = 0; op < budget; ++op) {
    const auto step = best_rewiring(out.final_graph, objective, deadline);
    if (!step) {
      ++out.skipped;
      continue;
    }
    apply_rewiring(out.final_graph, step->rewiring);
    out.applied.push_back(step->rewiring);
  }
  out.delta = evaluate(objective, out.final_graph) - f0;
  return out;
}

double time_episode(const std::function<void()>& episode) {
  const auto start = std::chrono::steady_clock::now();
  episode();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace rewire
