#pragma once

#include <cstdint>
#include <string>

#include "rewire/graph.hpp"

namespace rewire {

enum class GraphModel { BarabasiAlbert, WattsStrogatz, ErdosRenyi };

struct GeneratorSpec {
  GraphModel model = GraphModel::BarabasiAlbert;
  int n = 30;
  int attach = 2;      // BA: edges per arriving node
  int lattice_k = 4;   // WS: ring-lattice degree
  double p = 0.1;      // WS rewiring / ER edge probability
  std::uint64_t seed = 0;

  static GeneratorSpec barabasi_albert(int n, int attach, std::uint64_t seed);
  static GeneratorSpec watts_strogatz(int n, int k, double p, std::uint64_t seed);
  static GeneratorSpec erdos_renyi(int n, double p, std::uint64_t seed);

  /// Throws std::invalid_argument when parameters are out of range.
  void validate() const;
  /// Short family name: "BA-2", "BA-1", "WS", "ER".
  std::string label() const;
};

/// Parses a family label ("BA-2", "BA-1", "WS", "ER") into a spec carrying the
/// default parameters for that family.
GeneratorSpec spec_from_label(const std::string& label, int n, std::uint64_t seed);

/// Connected simple graph on exactly `spec.n` nodes.
///
/// BA grows from a star on attach+1 nodes, each arriving node linking to
/// `attach` distinct existing nodes with probability proportional to degree.
/// WS and ER samples that come out disconnected are redrawn from a fresh
/// substream, at most 100 times.
Graph generate(const GeneratorSpec& spec);

}  // namespace rewire
