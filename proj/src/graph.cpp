#include "routesim/graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

namespace routesim {

void Graph::add_node(NodeId id) { nodes_.try_emplace(id); }

void Graph::add_edge(NodeId from, NodeId to, Cost weight) {
  if (has_edge(from, to)) {
    throw std::invalid_argument("duplicate edge " + std::to_string(from) +
                                " -> " + std::to_string(to));
  }
  add_node(from);
  add_node(to);
  nodes_[from].push_back(edges_.size());
  edges_.push_back(Edge{from, to, weight});
}

bool Graph::has_edge(NodeId from, NodeId to) const {
  auto it = nodes_.find(from);
  if (it == nodes_.end()) return false;
  for (std::size_t idx : it->second) {
    if (edges_[idx].to == to) return true;
  }
  return false;
}

std::vector<NodeId> Graph::nodes() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) out.push_back(id);
  return out;
}

std::vector<Edge> Graph::edges_from(NodeId from) const {
  std::vector<Edge> out;
  auto it = nodes_.find(from);
  if (it == nodes_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(edges_[idx]);
  std::sort(out.begin(), out.end(),
            [](const Edge& a, const Edge& b) { return a.to < b.to; });
  return out;
}

namespace {

// Working state shared by both algorithms.  Alongside the public distance we
// track the hop count of the adopted path: the candidate order is
// (distance, hops, predecessor id).  Hop counts strictly decrease along pred
// links, which guarantees pred chains always walk back to the source without
// revisiting a node -- even in the presence of zero-weight cycles, where a
// bare lowest-predecessor rule can deadlock two nodes into choosing each
// other.  On ties of both distance and hops the lowest predecessor id wins,
// and both algorithms reach the identical fixed point.
struct Labels {
  std::map<NodeId, Cost> dist;
  std::map<NodeId, int> hops;
  std::map<NodeId, NodeId> pred;

  // True (and applies the update) when `via`->`to` offers a strictly better
  // (dist, hops, pred) label for `to`.
  bool relax(NodeId via, NodeId to, Cost cand_dist) {
    int cand_hops = hops[via] + 1;
    auto dit = dist.find(to);
    if (dit != dist.end()) {
      auto cur = std::tie(dit->second, hops[to], pred[to]);
      if (std::tie(cand_dist, cand_hops, via) >= cur) return false;
    }
    dist[to] = cand_dist;
    hops[to] = cand_hops;
    pred[to] = via;
    return true;
  }

  PathResult finish(NodeId source) const {
    PathResult r;
    r.source = source;
    r.dist = dist;
    r.pred = pred;
    r.pred.erase(source);
    return r;
  }
};

}  // namespace

std::optional<PathResult> bellman_ford(const Graph& g, NodeId source) {
  if (!g.has_node(source)) {
    throw std::invalid_argument("bellman_ford: unknown source node");
  }
  Labels lab;
  lab.dist[source] = 0;
  lab.hops[source] = 0;

  // Deterministic edge order: by (from, to).
  std::vector<Edge> edges = g.edges();
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });

  const std::size_t passes = g.node_count() == 0 ? 0 : g.node_count() - 1;
  for (std::size_t i = 0; i < passes; ++i) {
    for (const Edge& e : edges) {
      auto it = lab.dist.find(e.from);
      if (it == lab.dist.end()) continue;
      lab.relax(e.from, e.to, it->second + e.weight);
    }
  }

  // Verification pass: a strictly shorter distance still being offered means
  // a negative-weight cycle is reachable from the source.
  for (const Edge& e : edges) {
    auto it = lab.dist.find(e.from);
    if (it == lab.dist.end()) continue;
    auto dit = lab.dist.find(e.to);
    if (dit == lab.dist.end() || it->second + e.weight < dit->second) {
      return std::nullopt;
    }
  }
  return lab.finish(source);
}

PathResult dijkstra(const Graph& g, NodeId source) {
  if (!g.has_node(source)) {
    throw std::invalid_argument("dijkstra: unknown source node");
  }
  for (const Edge& e : g.edges()) {
    if (e.weight < 0) {
      throw std::invalid_argument("dijkstra: negative edge weight on " +
                                  std::to_string(e.from) + " -> " +
                                  std::to_string(e.to));
    }
  }

  Labels lab;
  lab.dist[source] = 0;
  lab.hops[source] = 0;

  // Heap keyed like the relaxation order so nodes settle in label order; a
  // popped entry whose key no longer matches the node's label is stale.
  using Item = std::tuple<Cost, int, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0, 0, source});

  while (!heap.empty()) {
    auto [d, h, u] = heap.top();
    heap.pop();
    if (d != lab.dist[u] || h != lab.hops[u]) continue;
    for (const Edge& e : g.edges_from(u)) {
      Cost cd = lab.dist[u];
      if (lab.relax(u, e.to, cd + e.weight)) {
        heap.push({lab.dist[e.to], lab.hops[e.to], e.to});
      }
    }
  }
  return lab.finish(source);
}

std::optional<std::vector<NodeId>> extract_path(const PathResult& r,
                                                NodeId dest) {
  if (!r.reachable(dest)) return std::nullopt;
  std::vector<NodeId> path;
  NodeId cur = dest;
  path.push_back(cur);
  while (cur != r.source) {
    auto it = r.pred.find(cur);
    if (it == r.pred.end()) return std::nullopt;  // defensive; cannot happen
    cur = it->second;
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace routesim
