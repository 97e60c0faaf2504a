#include "rewire/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace rewire {

namespace {

// Graph plus host names; nodes are always kept in ascending original order.
struct NamedGraph {
  Graph graph;
  std::vector<std::string> hosts;
};

NamedGraph keep_nodes(const NamedGraph& g, const std::vector<Node>& keep) {
  if (keep.empty()) throw std::runtime_error("ingest: filtering removed every node");
  NamedGraph out{induced_subgraph(g.graph, keep), {}};
  std::vector<Node> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  for (Node v : sorted) out.hosts.push_back(g.hosts[static_cast<std::size_t>(v)]);
  return out;
}

NamedGraph keep_largest_component(const NamedGraph& g) { return keep_nodes(g, largest_component(g.graph)); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

IngestResult ingest_host_events(std::span<const HostEvent> records, const IngestOptions& opts) {
  // Steps 1-2: directed links, then reciprocated pairs only.
  std::map<std::string, int> ids;
  for (const auto& [src, dst] : records) {
    ids.emplace(src, 0);
    ids.emplace(dst, 0);
  }
  std::vector<std::string> names;
  names.reserve(ids.size());
  for (auto& [name, id] : ids) {
    id = static_cast<int>(names.size());
    names.push_back(name);
  }
  std::set<std::pair<int, int>> directed;
  for (const auto& [src, dst] : records) {
    if (src != dst) directed.emplace(ids[src], ids[dst]);
  }
  if (names.empty()) throw std::runtime_error("ingest: no events");
  NamedGraph g{Graph(static_cast<int>(names.size())), names};
  for (const auto& [a, b] : directed) {
    if (a < b && directed.count({b, a})) g.graph.add_edge(a, b);
  }

  // Step 3.
  g = keep_largest_component(g);

  // Step 4: hubs dominated by degree-1 neighbours.
  {
    std::vector<Node> keep;
    for (Node v = 0; v < g.graph.num_nodes(); ++v) {
      int leaves = 0;
      for (Node w : g.graph.neighbors(v)) leaves += g.graph.degree(w) == 1 ? 1 : 0;
      const int deg = g.graph.degree(v);
      const bool hub = deg > 0 && leaves >= opts.leaf_filter.min_leaf_neighbors &&
                       static_cast<double>(leaves) / deg >= opts.leaf_filter.min_leaf_fraction;
      if (!hub) keep.push_back(v);
    }
    g = keep_nodes(g, keep);
  }

  // Step 5.
  {
    std::vector<Node> keep;
    for (Node v = 0; v < g.graph.num_nodes(); ++v) {
      if (g.graph.degree(v) <= opts.degree_cap) keep.push_back(v);
    }
    g = keep_nodes(g, keep);
  }

  // Step 6.
  g = keep_largest_component(g);
  if (g.graph.num_edges() == 0) throw std::runtime_error("ingest: resulting graph has no edges");

  IngestResult result;
  result.diameter = diameter(g.graph);
  result.graph = std::move(g.graph);
  result.hosts = std::move(g.hosts);
  return result;
}

std::vector<HostEvent> read_host_events_csv(std::istream& in, const std::string& src_column,
                                            const std::string& dst_column) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("event log: empty input");
  const auto header = split_csv(line);

  auto find_column = [&](const std::string& wanted, std::initializer_list<const char*> aliases,
                         std::size_t fallback) -> std::size_t {
    std::vector<std::string> names;
    if (!wanted.empty()) {
      names.push_back(lower(wanted));
    } else {
      for (const char* a : aliases) names.emplace_back(a);
    }
    for (const auto& name : names) {
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (lower(header[c]) == name) return c;
      }
    }
    if (!wanted.empty()) throw std::runtime_error("event log: no column named '" + wanted + "'");
    return fallback;
  };
  const std::size_t src = find_column(src_column, {"srcdevice", "src", "source", "src_host", "source_host"}, 0);
  const std::size_t dst = find_column(dst_column, {"dstdevice", "dst", "destination", "dst_host", "destination_host"}, 1);

  std::vector<HostEvent> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (fields.size() <= std::max(src, dst)) {
      throw std::runtime_error("event log line " + std::to_string(line_no) + ": too few columns");
    }
    events.emplace_back(fields[src], fields[dst]);
  }
  return events;
}

}  // namespace rewire
