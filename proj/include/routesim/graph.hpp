#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// Weighted directed graph used by the routing engines for shortest-path
// computation.  Edge weights are integers; negative weights are allowed at
// this layer (Bellman-Ford handles them, Dijkstra rejects them).
// ============================================================================

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  Cost weight = 0;
};

class Graph {
 public:
  // Adding a node that already exists is a no-op.
  void add_node(NodeId id);

  // Adds a directed edge.  Creates endpoints implicitly.  Throws
  // std::invalid_argument if an edge (from, to) is already present.
  void add_edge(NodeId from, NodeId to, Cost weight);

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  bool has_edge(NodeId from, NodeId to) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Nodes in ascending id order.
  std::vector<NodeId> nodes() const;

  // Edges in insertion order.
  const std::vector<Edge>& edges() const { return edges_; }

  // Outgoing edges of `from` ordered by destination id.
  std::vector<Edge> edges_from(NodeId from) const;

 private:
  std::map<NodeId, std::vector<std::size_t>> nodes_;  // node -> edge indexes
  std::vector<Edge> edges_;
};

// Result of a single-source shortest-path computation.  Unreachable nodes are
// simply absent from both maps; the source itself has distance 0 and no
// predecessor entry.
struct PathResult {
  NodeId source = 0;
  std::map<NodeId, Cost> dist;
  std::map<NodeId, NodeId> pred;

  bool reachable(NodeId n) const { return dist.count(n) != 0; }
};

// Bellman-Ford over all nodes: exactly |V|-1 relaxation passes over the edge
// list, then one verification pass.  Returns std::nullopt when the
// verification pass can still relax an edge, i.e. a negative-weight cycle is
// reachable from the source.  Ties between equal-cost predecessors resolve to
// the lowest predecessor id.
std::optional<PathResult> bellman_ford(const Graph& g, NodeId source);

// Dijkstra with a binary heap.  Throws std::invalid_argument if any edge in
// the graph has negative weight.  Same tie-break rule as bellman_ford, so
// both algorithms produce identical PathResults on non-negative graphs.
PathResult dijkstra(const Graph& g, NodeId source);

// Reconstructs source -> dest as an ordered node list (inclusive on both
// ends).  Returns std::nullopt when dest is not reachable in `r`.
std::optional<std::vector<NodeId>> extract_path(const PathResult& r,
                                                NodeId dest);

}  // namespace routesim
