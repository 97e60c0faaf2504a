#pragma once

#include <string>

#include "rewire/graph.hpp"

namespace rewire {

enum class ObjectiveKind { Shannon, Merw };

struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::Merw;
  double reward_scale = 10.0;  // c_F, applied only when turning gains into rewards

  /// Reward scale 10 for MERW and 100 for Shannon.
  static ObjectiveConfig defaults(ObjectiveKind kind);
};

std::string to_string(ObjectiveKind kind);
/// Accepts "shannon" or "merw" (case-insensitive).
ObjectiveKind parse_objective(const std::string& name);

/// Base-2 Shannon entropy of the degree distribution over degrees 1..n-1.
double shannon_entropy(const Graph& g);

/// ln of the adjacency spectral radius. Throws std::domain_error for a
/// disconnected graph.
double merw_entropy(const Graph& g);

/// Unscaled objective value.
double evaluate(const ObjectiveConfig& config, const Graph& g);

}  // namespace rewire
