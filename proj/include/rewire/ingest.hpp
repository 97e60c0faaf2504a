#pragma once

#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rewire/graph.hpp"

namespace rewire {

using HostEvent = std::pair<std::string, std::string>;  // (source host, destination host)

/// Hub filter: a node is dropped when at least `min_leaf_neighbors` of its
/// neighbours have degree 1 and those leaves make up at least
/// `min_leaf_fraction` of its neighbourhood.
struct LeafFilter {
  int min_leaf_neighbors = 10;
  double min_leaf_fraction = 0.5;
};

struct IngestOptions {
  int degree_cap = 80;
  LeafFilter leaf_filter;
};

struct IngestResult {
  Graph graph;
  std::vector<std::string> hosts;  // host name of each node id
  int diameter = 0;
};

/// Builds an undirected host graph from directed host-to-host events:
///   1. directed graph over unique hosts (self-events ignored)
///   2. keep only reciprocated links, as undirected edges
///   3. keep the largest connected component
///   4. drop hub nodes matching the leaf filter
///   5. drop nodes with degree above the cap
///   6. keep the largest connected component again
/// Throws std::runtime_error if nothing survives.
IngestResult ingest_host_events(std::span<const HostEvent> records, const IngestOptions& opts = {});

/// Reads a comma-separated event log. The first line is a header; the source
/// and destination columns are located by name (`src_column`, `dst_column`,
/// case-insensitive). Empty names fall back to the first recognised alias
/// (SrcDevice/DstDevice, src/dst, source/destination) or columns 0 and 1.
std::vector<HostEvent> read_host_events_csv(std::istream& in, const std::string& src_column = "",
                                            const std::string& dst_column = "");

}  // namespace rewire
