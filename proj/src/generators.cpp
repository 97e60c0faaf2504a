#include "rewire/generators.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "rewire/rng.hpp"

namespace rewire {

GeneratorSpec GeneratorSpec::barabasi_albert(int n, int attach, std::uint64_t seed) {
  GeneratorSpec s;
  s.model = GraphModel::BarabasiAlbert;
  s.n = n;
  s.attach = attach;
  s.seed = seed;
  return s;
}

GeneratorSpec GeneratorSpec::watts_strogatz(int n, int k, double p, std::uint64_t seed) {
  GeneratorSpec s;
  s.model = GraphModel::WattsStrogatz;
  s.n = n;
  s.lattice_k = k;
  s.p = p;
  s.seed = seed;
  return s;
}

GeneratorSpec GeneratorSpec::erdos_renyi(int n, double p, std::uint64_t seed) {
  GeneratorSpec s;
  s.model = GraphModel::ErdosRenyi;
  s.n = n;
  s.p = p;
  s.seed = seed;
  return s;
}

void GeneratorSpec::validate() const {
  if (n < 1) throw std::invalid_argument("generator: n must be >= 1");
  switch (model) {
    case GraphModel::BarabasiAlbert:
      if (attach < 1 || attach + 1 > n) throw std::invalid_argument("generator: BA requires 1 <= M < n");
      break;
    case GraphModel::WattsStrogatz:
      if (lattice_k < 2 || lattice_k % 2 != 0 || lattice_k >= n) {
        throw std::invalid_argument("generator: WS requires even k with 2 <= k < n");
      }
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("generator: WS requires 0 <= p <= 1");
      break;
    case GraphModel::ErdosRenyi:
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("generator: ER requires 0 <= p <= 1");
      break;
  }
}

std::string GeneratorSpec::label() const {
  switch (model) {
    case GraphModel::BarabasiAlbert:
      return "BA-" + std::to_string(attach);
    case GraphModel::WattsStrogatz:
      return "WS";
    case GraphModel::ErdosRenyi:
      return "ER";
  }
  return "?";
}

GeneratorSpec spec_from_label(const std::string& label, int n, std::uint64_t seed) {
  if (label == "BA-1") return GeneratorSpec::barabasi_albert(n, 1, seed);
  if (label == "BA-2" || label == "BA") return GeneratorSpec::barabasi_albert(n, 2, seed);
  if (label == "WS") return GeneratorSpec::watts_strogatz(n, 4, 0.1, seed);
  if (label == "ER") return GeneratorSpec::erdos_renyi(n, 0.15, seed);
  throw std::invalid_argument("unknown graph family '" + label + "' (expected BA-1, BA-2, WS or ER)");
}

namespace {

constexpr int kMaxAttempts = 100;

Graph barabasi_albert(const GeneratorSpec& spec, Rng& rng) {
  const int m = spec.attach;
  Graph g(spec.n);
  // Each node appears once per incident edge, so uniform draws are degree-proportional.
  std::vector<Node> endpoints;
  for (Node leaf = 1; leaf <= m; ++leaf) {
    g.add_edge(0, leaf);
    endpoints.push_back(0);
    endpoints.push_back(leaf);
  }
  std::vector<Node> targets;
  for (Node v = m + 1; v < spec.n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      const Node t = endpoints[uniform_index(rng, endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (Node t : targets) {
      g.add_edge(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return g;
}

Graph watts_strogatz(const GeneratorSpec& spec, Rng& rng) {
  const int n = spec.n;
  Graph g(n);
  for (int j = 1; j <= spec.lattice_k / 2; ++j) {
    for (Node u = 0; u < n; ++u) g.add_edge(u, (u + j) % n);
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Node> candidates;
  for (int j = 1; j <= spec.lattice_k / 2; ++j) {
    for (Node u = 0; u < n; ++u) {
      const Node v = (u + j) % n;
      if (coin(rng) >= spec.p) continue;
      if (!g.has_edge(u, v)) continue;
      candidates.clear();
      for (Node w = 0; w < n; ++w) {
        if (w != u && !g.has_edge(u, w)) candidates.push_back(w);
      }
      if (candidates.empty()) continue;
      const Node w = candidates[uniform_index(rng, candidates.size())];
      g.remove_edge(u, v);
      g.add_edge(u, w);
    }
  }
  return g;
}

Graph erdos_renyi(const GeneratorSpec& spec, Rng& rng) {
  Graph g(spec.n);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Node i = 0; i < spec.n; ++i) {
    for (Node j = i + 1; j < spec.n; ++j) {
      if (coin(rng) < spec.p) g.add_edge(i, j);
    }
  }
  return g;
}

}  // namespace

Graph generate(const GeneratorSpec& spec) {
  spec.validate();
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(attempt));
    Graph g;
    switch (spec.model) {
      case GraphModel::BarabasiAlbert:
        g = barabasi_albert(spec, rng);
        break;
      case GraphModel::WattsStrogatz:
        g = watts_strogatz(spec, rng);
        break;
      case GraphModel::ErdosRenyi:
        g = erdos_renyi(spec, rng);
        break;
    }
    if (is_connected(g)) return g;
  }
  throw std::runtime_error("generate: no connected " + spec.label() + " sample after " +
                           std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace rewire
