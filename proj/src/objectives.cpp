#include "rewire/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace rewire {

ObjectiveConfig ObjectiveConfig::defaults(ObjectiveKind kind) {
  return ObjectiveConfig{kind, kind == ObjectiveKind::Merw ? 10.0 : 100.0};
}

std::string to_string(ObjectiveKind kind) { return kind == ObjectiveKind::Merw ? "MERW" : "Shannon"; }

ObjectiveKind parse_objective(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "merw") return ObjectiveKind::Merw;
  if (s == "shannon") return ObjectiveKind::Shannon;
  throw std::invalid_argument("unknown objective '" + name + "' (expected shannon or merw)");
}

double shannon_entropy(const Graph& g) {
  const auto q = degree_distribution(g);
  double h = 0.0;
  for (std::size_t k = 1; k < q.size(); ++k) {
    if (q[k] > 0.0) h -= q[k] * std::log2(q[k]);
  }
  return h;
}

double merw_entropy(const Graph& g) {
  if (!is_connected(g)) throw std::domain_error("merw_entropy: graph is disconnected");
  return std::log(largest_eigenvalue(g));
}

double evaluate(const ObjectiveConfig& config, const Graph& g) {
  switch (config.kind) {
    case ObjectiveKind::Shannon:
      return shannon_entropy(g);
    case ObjectiveKind::Merw:
      return merw_entropy(g);
  }
  throw std::logic_error("evaluate: unknown objective");
}

}  // namespace rewire
