#include "routesim/linkstate.hpp"

#include <algorithm>

namespace routesim {

Cost ls_link_cost(std::int64_t bandwidth_bps, std::int64_t reference_bps) {
  if (bandwidth_bps <= 0) {
    throw std::invalid_argument("ls_link_cost: bandwidth must be positive");
  }
  return std::max<Cost>(1, reference_bps / bandwidth_bps);
}

FloodResult ls_flood_lsp(Lsdb& lsdb, const Lsp& lsp, InterfaceId in_interface,
                         const std::vector<InterfaceId>& up_interfaces) {
  FloodResult res;
  auto it = lsdb.find(lsp.origin);
  if (it != lsdb.end() && lsp.seq <= it->second.seq) {
    return res;  // stale or duplicate: neither stored nor forwarded
  }
  lsdb[lsp.origin] = lsp;
  res.accepted = true;
  for (InterfaceId id : up_interfaces) {
    if (id != in_interface) res.forward_on.push_back(id);
  }
  return res;
}

ForwardingTable ls_compute_forwarding(
    const Lsdb& lsdb, NodeId self,
    const std::map<NodeId, std::pair<InterfaceId, Cost>>& first_hop_links) {
  Graph g;
  g.add_node(self);
  for (const auto& [origin, lsp] : lsdb) {
    g.add_node(origin);
    for (const LspLink& l : lsp.links) {
      auto nit = lsdb.find(l.neighbor);
      if (nit == lsdb.end()) {
        // No LSP from that node: a silent attachment (host).  Terminal
        // one-way edge -- it cannot create transit paths.
        if (!g.has_edge(origin, l.neighbor)) {
          g.add_edge(origin, l.neighbor, l.cost);
        }
        continue;
      }
      // Router neighbor: keep the edge only when confirmed from both sides.
      const bool confirmed =
          std::any_of(nit->second.links.begin(), nit->second.links.end(),
                      [&](const LspLink& back) {
                        return back.neighbor == origin;
                      });
      if (confirmed && !g.has_edge(origin, l.neighbor)) {
        g.add_edge(origin, l.neighbor, l.cost);
      }
    }
  }

  ForwardingTable table;
  PathResult spf = dijkstra(g, self);
  for (const auto& [dest, dist] : spf.dist) {
    if (dest == self) continue;
    // First hop: walk the predecessor chain back to ourselves.
    NodeId hop = dest;
    while (true) {
      auto pit = spf.pred.find(hop);
      if (pit == spf.pred.end() || pit->second == self) break;
      hop = pit->second;
    }
    auto lit = first_hop_links.find(hop);
    if (lit == first_hop_links.end()) continue;  // no usable local link
    table[dest] = ForwardingEntry{hop, lit->second.first, dist};
  }
  return table;
}

// ============================================================================
// Engine
// ============================================================================

LinkStateEngine::LinkStateEngine(NodeId self,
                                 std::vector<InterfaceInfo> interfaces,
                                 LsFlavorConfig cfg)
    : RoutingEngine(self, std::move(interfaces)), cfg_(cfg) {}

Cost LinkStateEngine::interface_cost(const InterfaceInfo& i) const {
  return ls_link_cost(i.bandwidth_bps, cfg_.cost_reference_bw_bps);
}

std::vector<InterfaceId> LinkStateEngine::up_interface_ids() const {
  std::vector<InterfaceId> ids;
  for (const auto& i : interfaces_) {
    if (i.up) ids.push_back(i.id);
  }
  return ids;
}

void LinkStateEngine::schedule_spf(std::int64_t now_s) {
  // Coalescing hold-down: while a recompute is already scheduled, further
  // changes ride along with it.
  if (!pending_spf_s_) pending_spf_s_ = now_s + cfg_.spf_delay_s;
}

void LinkStateEngine::run_spf() {
  std::map<NodeId, std::pair<InterfaceId, Cost>> first_hops;
  for (const auto& [nbr, adj] : adjacencies_) {
    if (adj.state != AdjacencyState::Up) continue;
    const InterfaceInfo* i = find_interface(adj.iface);
    if (!i || !i->up) continue;
    first_hops.emplace(nbr, std::make_pair(adj.iface, interface_cost(*i)));
  }
  for (const auto& i : interfaces_) {
    if (!i.up) continue;
    for (NodeId host : i.attached_hosts) {
      first_hops.emplace(host, std::make_pair(i.id, interface_cost(i)));
    }
  }
  set_table(ls_compute_forwarding(lsdb_, self_, first_hops));
}

void LinkStateEngine::originate_and_flood(std::int64_t now_s,
                                          std::vector<Outbound>& out) {
  Lsp lsp;
  lsp.origin = self_;
  lsp.seq = ++seq_;
  lsp.age_created_s = now_s;
  for (const auto& [nbr, adj] : adjacencies_) {
    if (adj.state != AdjacencyState::Up) continue;
    const InterfaceInfo* i = find_interface(adj.iface);
    if (!i || !i->up) continue;
    lsp.links.push_back(LspLink{nbr, interface_cost(*i)});
  }
  for (const auto& i : interfaces_) {
    if (!i.up) continue;
    for (NodeId host : i.attached_hosts) {
      lsp.links.push_back(LspLink{host, interface_cost(i)});
    }
  }
  last_origination_s_ = now_s;
  lsdb_[self_] = lsp;
  schedule_spf(now_s);
  for (InterfaceId id : up_interface_ids()) {
    out.push_back(Outbound{id, std::nullopt,
                           ProtocolMessage{LspMsg{self_, lsp}}});
  }
}

bool LinkStateEngine::process_hello(const HelloMsg& hello,
                                    InterfaceId in_iface,
                                    std::int64_t now_s) {
  const InterfaceInfo* iface = find_interface(in_iface);
  if (!iface || !iface->up) return false;
  const bool connected =
      std::find(iface->possible_neighbors.begin(),
                iface->possible_neighbors.end(),
                hello.sender) != iface->possible_neighbors.end();
  if (!connected) {
    ++malformed_;
    return false;
  }

  heard_[in_iface][hello.sender] = now_s;
  const bool two_way = std::find(hello.seen.begin(), hello.seen.end(),
                                 self_) != hello.seen.end();

  auto it = adjacencies_.find(hello.sender);
  if (it == adjacencies_.end()) {
    Adjacency adj;
    adj.neighbor = hello.sender;
    adj.iface = in_iface;
    adj.state = two_way ? AdjacencyState::Up : AdjacencyState::Init;
    adj.last_hello_s = now_s;
    adjacencies_.emplace(hello.sender, adj);
    return adj.state == AdjacencyState::Up;
  }

  Adjacency& adj = it->second;
  adj.last_hello_s = now_s;
  adj.iface = in_iface;
  if (two_way && adj.state != AdjacencyState::Up) {
    adj.state = AdjacencyState::Up;
    return true;
  }
  if (!two_way && adj.state == AdjacencyState::Down) {
    adj.state = AdjacencyState::Init;
  }
  return false;
}

void LinkStateEngine::on_tick(SimTime now, std::vector<Outbound>& out) {
  const std::int64_t now_s = seconds(now);

  // First tick: announce ourselves even before any adjacency exists, so
  // directly attached destinations enter the database immediately.
  if (seq_ == 0) originate_and_flood(now_s, out);

  // Dead-interval expiry.
  bool lost = false;
  for (auto& [nbr, adj] : adjacencies_) {
    if (adj.state == AdjacencyState::Up &&
        now_s - adj.last_hello_s >= cfg_.dead_interval_s) {
      adj.state = AdjacencyState::Down;
      lost = true;
    }
  }
  // Forget stale hello sightings so `seen` lists stay honest.
  for (auto& [iface, heard] : heard_) {
    for (auto it = heard.begin(); it != heard.end();) {
      if (now_s - it->second >= cfg_.dead_interval_s) {
        it = heard.erase(it);
      } else {
        ++it;
      }
    }
  }
  if (lost) originate_and_flood(now_s, out);

  // Hello emission.
  if (now_s >= cfg_.phase_s &&
      (now_s - cfg_.phase_s) % cfg_.hello_interval_s == 0) {
    for (const auto& i : interfaces_) {
      if (!i.up) continue;
      HelloMsg hello;
      hello.sender = self_;
      auto hit = heard_.find(i.id);
      if (hit != heard_.end()) {
        for (const auto& [nbr, _] : hit->second) hello.seen.push_back(nbr);
      }
      out.push_back(Outbound{i.id, std::nullopt, ProtocolMessage{hello}});
    }
  }

  // Periodic refresh origination.
  if (seq_ > 0 && now_s - last_origination_s_ >= cfg_.lsp_refresh_s) {
    originate_and_flood(now_s, out);
  }

  // Delayed SPF.
  if (pending_spf_s_ && now_s >= *pending_spf_s_) {
    pending_spf_s_.reset();
    run_spf();
  }
}

void LinkStateEngine::on_message(const ProtocolMessage& msg,
                                 InterfaceId in_iface, SimTime now,
                                 std::vector<Outbound>& out) {
  const std::int64_t now_s = seconds(now);
  if (const auto* hello = std::get_if<HelloMsg>(&msg)) {
    if (process_hello(*hello, in_iface, now_s)) {
      originate_and_flood(now_s, out);
    }
    return;
  }
  if (const auto* lspmsg = std::get_if<LspMsg>(&msg)) {
    if (lspmsg->lsp.origin == self_) return;  // our own copy echoed back
    FloodResult res =
        ls_flood_lsp(lsdb_, lspmsg->lsp, in_iface, up_interface_ids());
    if (res.accepted) {
      schedule_spf(now_s);
      for (InterfaceId id : res.forward_on) {
        out.push_back(Outbound{id, std::nullopt,
                               ProtocolMessage{LspMsg{self_, lspmsg->lsp}}});
      }
    }
    return;
  }
  // Other protocols' messages are not ours to parse.
}

void LinkStateEngine::on_interface_down(InterfaceId iface, SimTime now,
                                        std::vector<Outbound>& out) {
  set_interface_up(iface, false);
  heard_.erase(iface);
  bool lost = false;
  for (auto& [nbr, adj] : adjacencies_) {
    if (adj.iface == iface && adj.state != AdjacencyState::Down) {
      const bool was_up = adj.state == AdjacencyState::Up;
      adj.state = AdjacencyState::Down;
      lost = lost || was_up;
    }
  }
  if (lost) {
    originate_and_flood(seconds(now), out);
  } else if (find_interface(iface) &&
             !find_interface(iface)->attached_hosts.empty()) {
    // Losing a host attachment changes our advertised stubs even with no
    // router adjacency on the interface.
    originate_and_flood(seconds(now), out);
  }
}

void LinkStateEngine::on_interface_up(InterfaceId iface, SimTime now,
                                      std::vector<Outbound>& out) {
  set_interface_up(iface, true);
  if (find_interface(iface) &&
      !find_interface(iface)->attached_hosts.empty() && seq_ > 0) {
    originate_and_flood(seconds(now), out);  // re-advertise host stubs
  }
  // Router adjacencies re-form through the regular hello exchange.
}

}  // namespace routesim
