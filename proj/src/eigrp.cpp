#include "routesim/eigrp.hpp"

#include <algorithm>
#include <stdexcept>

namespace routesim {

Cost eigrp_composite_metric(std::int64_t bandwidth_bps,
                            std::int64_t total_delay_us) {
  const std::int64_t bw_kbps = bandwidth_bps / 1000;
  if (bw_kbps <= 0) {
    throw std::invalid_argument("eigrp_composite_metric: bandwidth too low");
  }
  return 256 * (10'000'000 / bw_kbps + total_delay_us / 10);
}

Cost dual_computed_distance(const NeighborReport& report) {
  if (report.reported_distance >= kEigrpInfinity) return kEigrpInfinity;
  return report.reported_distance + report.link_metric;
}

bool dual_feasibility_check(const DualTopologyEntry& entry, NodeId neighbor) {
  auto it = entry.reported.find(neighbor);
  if (it == entry.reported.end()) {
    throw std::invalid_argument("dual_feasibility_check: no report");
  }
  return it->second.reported_distance < entry.feasible_distance;
}

namespace {

// Best candidate by (computed distance, neighbor id); feasible_only filters
// by the strict feasibility condition.
std::optional<std::pair<NodeId, Cost>> best_candidate(
    const DualTopologyEntry& entry, bool feasible_only) {
  std::optional<std::pair<NodeId, Cost>> best;
  for (const auto& [nbr, report] : entry.reported) {
    if (feasible_only &&
        report.reported_distance >= entry.feasible_distance) {
      continue;
    }
    const Cost computed = dual_computed_distance(report);
    if (computed >= kEigrpInfinity) continue;
    if (!best || computed < best->second ||
        (computed == best->second && nbr < best->first)) {
      best = {nbr, computed};
    }
  }
  return best;
}

}  // namespace

DualOutcome dual_route_computation(DualTopologyEntry& entry,
                                   const std::set<NodeId>& current_neighbors,
                                   std::optional<NodeId> exclude_from_queries) {
  if (entry.state != DualState::Passive) {
    throw std::logic_error("dual_route_computation: entry is Active");
  }
  DualOutcome out;

  if (auto best = best_candidate(entry, /*feasible_only=*/true)) {
    entry.successor = best->first;
    entry.feasible_distance = std::min(entry.feasible_distance, best->second);
    out.action = DualOutcome::Install;
    return out;
  }

  for (NodeId n : current_neighbors) {
    if (exclude_from_queries && *exclude_from_queries == n) continue;
    out.query_targets.insert(n);
  }
  if (!out.query_targets.empty()) {
    entry.state = DualState::Active;
    entry.outstanding_replies = out.query_targets;
    out.action = DualOutcome::StartDiffusing;
    return out;
  }

  entry.successor.reset();
  entry.feasible_distance = kEigrpInfinity;
  out.action = DualOutcome::Unreachable;
  return out;
}

bool dual_finalize_if_done(DualTopologyEntry& entry) {
  if (entry.state != DualState::Active || !entry.outstanding_replies.empty()) {
    return false;
  }
  entry.state = DualState::Passive;
  if (auto best = best_candidate(entry, /*feasible_only=*/false)) {
    // Fresh passive period: the feasible distance restarts at the new
    // minimum instead of keeping the stale historical floor.
    entry.feasible_distance = best->second;
    entry.successor = best->first;
  } else {
    entry.feasible_distance = kEigrpInfinity;
    entry.successor.reset();
  }
  return true;
}

ReplyOutcome dual_process_reply(DualTopologyEntry& entry, NodeId neighbor,
                                Cost reply_rd) {
  if (entry.state != DualState::Active) {
    throw std::logic_error("dual_process_reply: entry is Passive");
  }
  if (!entry.outstanding_replies.count(neighbor)) {
    throw std::logic_error("dual_process_reply: unexpected replier");
  }
  auto it = entry.reported.find(neighbor);
  if (it == entry.reported.end()) {
    throw std::invalid_argument("dual_process_reply: no report for replier");
  }
  it->second.reported_distance = reply_rd;
  entry.outstanding_replies.erase(neighbor);
  return ReplyOutcome{dual_finalize_if_done(entry)};
}

// ============================================================================
// Engine
// ============================================================================

EigrpEngine::EigrpEngine(NodeId self, std::vector<InterfaceInfo> interfaces,
                         EigrpConfig cfg)
    : RoutingEngine(self, std::move(interfaces)), cfg_(cfg) {
  for (const InterfaceInfo& i : interfaces_) {
    for (NodeId host : i.attached_hosts) {
      direct_ifaces_[host] = i.id;
      if (!i.up) continue;
      DualTopologyEntry& e = topology_[host];
      e.dest = host;
      e.reported[self_] = NeighborReport{0, interface_metric(i)};
      e.successor = self_;
      e.feasible_distance = interface_metric(i);
    }
  }
  rebuild_forwarding();
}

Cost EigrpEngine::interface_metric(const InterfaceInfo& i) const {
  return eigrp_composite_metric(i.bandwidth_bps, i.prop_delay_us + 100);
}

Cost EigrpEngine::current_metric(NodeId dest) const {
  auto it = topology_.find(dest);
  if (it == topology_.end() || !it->second.successor) return kEigrpInfinity;
  auto rit = it->second.reported.find(*it->second.successor);
  if (rit == it->second.reported.end()) return kEigrpInfinity;
  return dual_computed_distance(rit->second);
}

std::optional<NodeId> EigrpEngine::successor(NodeId dest) const {
  auto it = topology_.find(dest);
  if (it == topology_.end()) return std::nullopt;
  return it->second.successor;
}

InterfaceId EigrpEngine::neighbor_iface(NodeId neighbor) const {
  auto it = neighbors_.find(neighbor);
  return it == neighbors_.end() ? -1 : it->second.iface;
}

bool EigrpEngine::convergence_pending() const {
  return std::any_of(topology_.begin(), topology_.end(), [](const auto& kv) {
    return kv.second.state == DualState::Active;
  });
}

void EigrpEngine::rebuild_forwarding() {
  ForwardingTable t;
  for (const auto& [dest, e] : topology_) {
    if (!e.successor) continue;
    const Cost m = current_metric(dest);
    if (m >= kEigrpInfinity) continue;
    if (*e.successor == self_) {
      auto dit = direct_ifaces_.find(dest);
      if (dit == direct_ifaces_.end()) continue;
      t[dest] = ForwardingEntry{dest, dit->second, m};
    } else {
      const InterfaceId iface = neighbor_iface(*e.successor);
      if (iface < 0) continue;
      t[dest] = ForwardingEntry{*e.successor, iface, m};
    }
  }
  set_table(std::move(t));
}

std::vector<EigrpRoute> EigrpEngine::full_table_routes(
    std::optional<InterfaceId> horizon_iface) const {
  std::vector<EigrpRoute> routes;
  for (const auto& [dest, e] : topology_) {
    const Cost m = current_metric(dest);
    if (m >= kEigrpInfinity) continue;
    if (horizon_iface && e.successor) {
      const InterfaceId out_iface = *e.successor == self_
                                        ? direct_ifaces_.at(dest)
                                        : neighbor_iface(*e.successor);
      if (out_iface == *horizon_iface) continue;  // split horizon
    }
    routes.push_back(EigrpRoute{dest, m});
  }
  return routes;
}

void EigrpEngine::send_triggered_updates(const std::set<NodeId>& dests,
                                         std::vector<Outbound>& out) {
  if (dests.empty()) return;
  for (const InterfaceInfo& i : interfaces_) {
    if (!i.up) continue;
    EigrpUpdate upd;
    upd.sender = self_;
    for (NodeId dest : dests) {
      auto it = topology_.find(dest);
      const Cost m = current_metric(dest);
      if (m < kEigrpInfinity && it != topology_.end() && it->second.successor) {
        const InterfaceId out_iface =
            *it->second.successor == self_
                ? direct_ifaces_.at(dest)
                : neighbor_iface(*it->second.successor);
        if (out_iface == i.id) continue;  // split horizon
      }
      upd.routes.push_back(EigrpRoute{dest, m});
    }
    if (!upd.routes.empty()) {
      out.push_back(Outbound{i.id, std::nullopt, ProtocolMessage{upd}});
    }
  }
}

void EigrpEngine::recompute_entry(NodeId dest,
                                  std::optional<NodeId> query_from,
                                  std::vector<Outbound>& out) {
  auto it = topology_.find(dest);
  if (it == topology_.end()) return;
  DualTopologyEntry& e = it->second;
  if (e.state != DualState::Passive) return;

  const auto old_succ = e.successor;
  const Cost old_metric = current_metric(dest);

  std::set<NodeId> nbrs;
  for (const auto& [n, _] : neighbors_) nbrs.insert(n);
  DualOutcome o = dual_route_computation(e, nbrs, query_from);

  if (o.action == DualOutcome::StartDiffusing) {
    const Cost rd = current_metric(dest);  // usually infinity by now
    for (NodeId target : o.query_targets) {
      out.push_back(Outbound{neighbor_iface(target), target,
                             ProtocolMessage{EigrpQuery{self_, dest, rd}}});
    }
    return;
  }

  if (e.successor != old_succ || current_metric(dest) != old_metric) {
    rebuild_forwarding();
    send_triggered_updates({dest}, out);
  }
}

void EigrpEngine::finalize_entry(NodeId dest, std::vector<Outbound>& out) {
  auto it = topology_.find(dest);
  if (it == topology_.end()) return;
  DualTopologyEntry& e = it->second;
  rebuild_forwarding();
  const Cost m = current_metric(dest);
  for (NodeId waiting : e.reply_pending_to) {
    if (!neighbors_.count(waiting)) continue;
    out.push_back(Outbound{neighbor_iface(waiting), waiting,
                           ProtocolMessage{EigrpReply{self_, dest, m}}});
  }
  e.reply_pending_to.clear();
  send_triggered_updates({dest}, out);
}

void EigrpEngine::lose_neighbor(NodeId neighbor, std::int64_t now_s,
                                std::vector<Outbound>& out) {
  (void)now_s;
  neighbors_.erase(neighbor);
  std::vector<NodeId> recompute;
  std::vector<NodeId> finalize;
  for (auto& [dest, e] : topology_) {
    e.reported.erase(neighbor);
    e.reply_pending_to.erase(neighbor);
    if (e.state == DualState::Active) {
      // A vanished neighbor will never answer; treat as an implicit
      // unreachable reply.
      if (e.outstanding_replies.erase(neighbor) &&
          dual_finalize_if_done(e)) {
        finalize.push_back(dest);
      }
    } else if (e.successor && *e.successor == neighbor) {
      recompute.push_back(dest);
    }
  }
  for (NodeId dest : finalize) finalize_entry(dest, out);
  for (NodeId dest : recompute) recompute_entry(dest, std::nullopt, out);
}

void EigrpEngine::on_tick(SimTime now, std::vector<Outbound>& out) {
  const std::int64_t now_s = seconds(now);

  std::vector<NodeId> lost;
  for (const auto& [n, nbr] : neighbors_) {
    if (now_s - nbr.last_hello_s >= cfg_.hold_time_s) lost.push_back(n);
  }
  for (NodeId n : lost) lose_neighbor(n, now_s, out);

  if (now_s >= cfg_.phase_s &&
      (now_s - cfg_.phase_s) % cfg_.hello_interval_s == 0) {
    for (const InterfaceInfo& i : interfaces_) {
      if (!i.up) continue;
      out.push_back(
          Outbound{i.id, std::nullopt, ProtocolMessage{HelloMsg{self_, {}}}});
    }
  }
}

void EigrpEngine::on_message(const ProtocolMessage& msg, InterfaceId in_iface,
                             SimTime now, std::vector<Outbound>& out) {
  const std::int64_t now_s = seconds(now);

  if (const auto* hello = std::get_if<HelloMsg>(&msg)) {
    const InterfaceInfo* iface = find_interface(in_iface);
    if (!iface || !iface->up) return;
    const bool connected =
        std::find(iface->possible_neighbors.begin(),
                  iface->possible_neighbors.end(),
                  hello->sender) != iface->possible_neighbors.end();
    if (!connected) {
      ++malformed_;
      return;
    }
    auto it = neighbors_.find(hello->sender);
    if (it != neighbors_.end()) {
      it->second.last_hello_s = now_s;
      return;
    }
    neighbors_[hello->sender] = EigrpNeighbor{hello->sender, in_iface, now_s};
    // Full topology exchange with the newcomer.
    EigrpUpdate upd;
    upd.sender = self_;
    upd.routes = full_table_routes(in_iface);
    if (!upd.routes.empty()) {
      out.push_back(Outbound{in_iface, hello->sender, ProtocolMessage{upd}});
    }
    return;
  }

  // Everything below requires an established neighbor.
  const NodeId sender = message_sender(msg);
  auto nit = neighbors_.find(sender);
  if (nit == neighbors_.end()) return;
  nit->second.last_hello_s = now_s;  // any traffic proves liveness
  const Cost lm = [&] {
    const InterfaceInfo* i = find_interface(nit->second.iface);
    return i ? interface_metric(*i) : kEigrpInfinity;
  }();

  if (const auto* upd = std::get_if<EigrpUpdate>(&msg)) {
    for (const EigrpRoute& r : upd->routes) {
      if (r.dest == self_) continue;
      DualTopologyEntry& e = topology_[r.dest];
      e.dest = r.dest;
      const NeighborReport nr{r.reported_distance, lm};
      auto rit = e.reported.find(sender);
      if (rit != e.reported.end() && rit->second == nr) continue;
      e.reported[sender] = nr;
      if (e.state == DualState::Passive) {
        recompute_entry(r.dest, std::nullopt, out);
      }
    }
    return;
  }

  if (const auto* q = std::get_if<EigrpQuery>(&msg)) {
    if (q->dest == self_) {
      out.push_back(Outbound{nit->second.iface, sender,
                             ProtocolMessage{EigrpReply{self_, q->dest, 0}}});
      return;
    }
    DualTopologyEntry& e = topology_[q->dest];
    e.dest = q->dest;
    e.reported[sender] = NeighborReport{q->reported_distance, lm};
    if (e.state == DualState::Passive && e.successor &&
        *e.successor == sender) {
      recompute_entry(q->dest, sender, out);
      auto it = topology_.find(q->dest);
      if (it != topology_.end() && it->second.state == DualState::Active) {
        it->second.reply_pending_to.insert(sender);
        return;  // answer once our own diffusion settles
      }
    }
    out.push_back(
        Outbound{nit->second.iface, sender,
                 ProtocolMessage{EigrpReply{self_, q->dest,
                                            current_metric(q->dest)}}});
    return;
  }

  if (const auto* rep = std::get_if<EigrpReply>(&msg)) {
    auto it = topology_.find(rep->dest);
    if (it == topology_.end()) return;
    DualTopologyEntry& e = it->second;
    if (e.state != DualState::Active ||
        !e.outstanding_replies.count(sender)) {
      ++stale_replies_;
      return;
    }
    // A queried neighbor may never have advertised this destination before;
    // its reply is the first report we have from it.
    e.reported.try_emplace(sender, NeighborReport{rep->reported_distance, lm});
    if (dual_process_reply(e, sender, rep->reported_distance).became_passive) {
      finalize_entry(rep->dest, out);
    }
    return;
  }
}

void EigrpEngine::on_interface_down(InterfaceId iface, SimTime now,
                                    std::vector<Outbound>& out) {
  set_interface_up(iface, false);
  const std::int64_t now_s = seconds(now);

  std::vector<NodeId> lost;
  for (const auto& [n, nbr] : neighbors_) {
    if (nbr.iface == iface) lost.push_back(n);
  }
  for (NodeId n : lost) lose_neighbor(n, now_s, out);

  for (const auto& [host, host_iface] : direct_ifaces_) {
    if (host_iface != iface) continue;
    auto it = topology_.find(host);
    if (it == topology_.end()) continue;
    it->second.reported.erase(self_);
    if (it->second.state == DualState::Passive && it->second.successor &&
        *it->second.successor == self_) {
      recompute_entry(host, std::nullopt, out);
    }
  }
}

void EigrpEngine::on_interface_up(InterfaceId iface, SimTime now,
                                  std::vector<Outbound>& out) {
  set_interface_up(iface, true);
  (void)now;
  const InterfaceInfo* i = find_interface(iface);
  if (!i) return;
  for (NodeId host : i->attached_hosts) {
    DualTopologyEntry& e = topology_[host];
    e.dest = host;
    e.reported[self_] = NeighborReport{0, interface_metric(*i)};
    if (e.state == DualState::Passive) {
      recompute_entry(host, std::nullopt, out);
    }
  }
}

}  // namespace routesim
