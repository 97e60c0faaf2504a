#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rewire/env.hpp"
#include "rewire/rng.hpp"

namespace rewire {

enum class BaselineKind { Random, Greedy };

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// Uniform choice over the valid actions at every sub-step of the MDP.
EpisodeResult random_episode(const RewireEnv& env, const Graph& g0, double budget_fraction, Rng& rng);

struct GreedyStep {
  Rewiring rewiring;
  double value = 0.0;  // objective after applying it
};

/// Best connectivity-preserving rewiring of `g`; ties go to the
/// lexicographically smallest (base, add, remove). Empty if every candidate
/// disconnects the graph.
std::optional<GreedyStep> best_rewiring(const Graph& g, const ObjectiveConfig& objective,
                                        const Deadline& deadline = std::nullopt);

struct GreedyResult {
  Graph final_graph;
  double delta = 0.0;
  std::vector<Rewiring> applied;
  int skipped = 0;  // operations with no connectivity-preserving candidate
};

/// Applies best_rewiring b times, b from the budget fraction.
/// Throws TimeoutError once the deadline passes.
GreedyResult greedy_episode(const Graph& g0, double budget_fraction, const ObjectiveConfig& objective,
                            const Deadline& deadline = std::nullopt);

/// Wall-clock seconds taken by `episode`.
double time_episode(const std::function<void()>& episode);

}  // namespace rewire
