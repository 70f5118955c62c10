#include "routesim/rip.hpp"

#include <algorithm>

namespace routesim {

bool rip_process_advertisement(RipTable& table, const RipAdvert& adv,
                               InterfaceId in_interface, const RipConfig& cfg,
                               std::int64_t now_s, int* malformed) {
  for (const RipRoute& r : adv.routes) {
    if (r.metric < 1 || r.metric > cfg.infinity_metric) {
      if (malformed) ++(*malformed);
      return false;
    }
  }

  bool changed = false;
  for (const RipRoute& r : adv.routes) {
    const int candidate = std::min(r.metric + 1, cfg.infinity_metric);
    auto it = table.find(r.dest);

    if (it == table.end()) {
      // Unknown destination: install, arming garbage collection when the
      // route arrives already unreachable.
      RipRouteEntry e;
      e.dest = r.dest;
      e.metric = candidate;
      e.next_hop = adv.sender;
      e.learned_interface = in_interface;
      e.last_refresh_s = now_s;
      if (candidate == cfg.infinity_metric) {
        e.gc_deadline_s = now_s + cfg.gc_interval_s;
      }
      table.emplace(r.dest, e);
      changed = true;
      continue;
    }

    RipRouteEntry& e = it->second;
    const bool from_next_hop = adv.sender == e.next_hop;
    if (from_next_hop) {
      // The current next hop is always believed, even when it got worse.
      if (candidate != e.metric) {
        const bool went_unreachable = candidate == cfg.infinity_metric;
        e.metric = candidate;
        e.learned_interface = in_interface;
        if (went_unreachable) {
          if (!e.gc_deadline_s) e.gc_deadline_s = now_s + cfg.gc_interval_s;
        } else {
          e.gc_deadline_s.reset();
          e.last_refresh_s = now_s;
        }
        changed = true;
      } else if (e.metric != cfg.infinity_metric) {
        e.last_refresh_s = now_s;  // plain refresh, no change
        e.learned_interface = in_interface;
      }
    } else if (candidate < e.metric) {
      e.metric = candidate;
      e.next_hop = adv.sender;
      e.learned_interface = in_interface;
      e.last_refresh_s = now_s;
      e.gc_deadline_s.reset();
      changed = true;
    }
  }
  return changed;
}

std::map<InterfaceId, RipAdvert> rip_build_advertisements(
    const RipTable& table, const std::vector<InterfaceInfo>& interfaces,
    NodeId self, const RipConfig& cfg) {
  std::map<InterfaceId, RipAdvert> out;
  for (const InterfaceInfo& iface : interfaces) {
    if (!iface.up) continue;
    RipAdvert adv;
    adv.sender = self;
    for (const auto& [dest, e] : table) {
      if (dest == self) continue;
      if (cfg.split_horizon && e.learned_interface == iface.id) {
        continue;  // learned over this interface; stay silent on it
      }
      adv.routes.push_back(RipRoute{dest, e.metric});
    }
    out.emplace(iface.id, adv);
  }
  return out;
}

RipTickResult rip_tick(RipTable& table, const RipConfig& cfg,
                       std::int64_t now_s) {
  RipTickResult res;
  res.emit_periodic = now_s >= cfg.phase_s &&
                      (now_s - cfg.phase_s) % cfg.advertise_interval_s == 0;

  for (auto it = table.begin(); it != table.end();) {
    RipRouteEntry& e = it->second;
    if (e.gc_deadline_s && now_s >= *e.gc_deadline_s) {
      it = table.erase(it);
      res.changed = true;
      continue;
    }
    if (e.metric != cfg.infinity_metric &&
        now_s - e.last_refresh_s >= cfg.timeout_s) {
      e.metric = cfg.infinity_metric;
      e.gc_deadline_s = now_s + cfg.gc_interval_s;
      res.expired_dests.push_back(e.dest);
      res.changed = true;
    }
    ++it;
  }
  return res;
}

bool rip_on_interface_down(RipTable& table, InterfaceId iface,
                           const RipConfig& cfg, std::int64_t now_s) {
  bool changed = false;
  for (auto& [dest, e] : table) {
    if (e.learned_interface != iface || e.metric == cfg.infinity_metric) {
      continue;
    }
    e.metric = cfg.infinity_metric;
    e.gc_deadline_s = now_s + cfg.gc_interval_s;
    changed = true;
  }
  return changed;
}

// ============================================================================
// Engine wrapper
// ============================================================================

RipEngine::RipEngine(NodeId self, std::vector<InterfaceInfo> interfaces,
                     RipConfig cfg)
    : RoutingEngine(self, std::move(interfaces)), cfg_(cfg) {
  refresh_direct_routes(0);
  rebuild_forwarding();
}

bool RipEngine::refresh_direct_routes(std::int64_t now_s) {
  bool changed = false;
  for (const InterfaceInfo& iface : interfaces_) {
    if (!iface.up) continue;
    for (NodeId host : iface.attached_hosts) {
      auto it = table_.find(host);
      if (it != table_.end() && it->second.next_hop == host &&
          it->second.metric == 1) {
        it->second.last_refresh_s = now_s;
        continue;
      }
      RipRouteEntry e;
      e.dest = host;
      e.metric = 1;
      e.next_hop = host;  // deliver directly on the segment
      e.learned_interface = iface.id;
      e.last_refresh_s = now_s;
      table_[host] = e;
      changed = true;
    }
  }
  return changed;
}

void RipEngine::rebuild_forwarding() {
  ForwardingTable t;
  for (const auto& [dest, e] : table_) {
    if (e.metric >= cfg_.infinity_metric) continue;
    t[dest] = ForwardingEntry{e.next_hop, e.learned_interface, e.metric};
  }
  set_table(std::move(t));
}

void RipEngine::emit_advertisements(std::vector<Outbound>& out) {
  for (auto& [iface, adv] : rip_build_advertisements(table_, interfaces_,
                                                     self_, cfg_)) {
    if (adv.routes.empty()) continue;
    out.push_back(Outbound{iface, std::nullopt, ProtocolMessage{adv}});
  }
}

void RipEngine::on_tick(SimTime now, std::vector<Outbound>& out) {
  const std::int64_t now_s = seconds(now);
  const bool direct_changed = refresh_direct_routes(now_s);
  RipTickResult res = rip_tick(table_, cfg_, now_s);
  if (res.changed || direct_changed) rebuild_forwarding();
  const bool trigger =
      cfg_.triggered_updates && (direct_changed || !res.expired_dests.empty());
  if (res.emit_periodic || trigger) emit_advertisements(out);
}

void RipEngine::on_message(const ProtocolMessage& msg, InterfaceId in_iface,
                           SimTime now, std::vector<Outbound>& out) {
  const auto* adv = std::get_if<RipAdvert>(&msg);
  if (!adv) return;  // other protocols' chatter is not ours to parse
  const std::int64_t now_s = seconds(now);
  if (rip_process_advertisement(table_, *adv, in_iface, cfg_, now_s,
                                &malformed_)) {
    rebuild_forwarding();
    if (cfg_.triggered_updates) emit_advertisements(out);
  }
}

void RipEngine::on_interface_down(InterfaceId iface, SimTime now,
                                  std::vector<Outbound>& out) {
  set_interface_up(iface, false);
  if (rip_on_interface_down(table_, iface, cfg_, seconds(now))) {
    rebuild_forwarding();
    if (cfg_.triggered_updates) emit_advertisements(out);
  }
}

void RipEngine::on_interface_up(InterfaceId iface, SimTime now,
                                std::vector<Outbound>& out) {
  (void)now;
  (void)out;
  // Recovery alone adds no knowledge; direct routes refresh on the next tick
  // and learned routes wait for fresh advertisements.
  set_interface_up(iface, true);
}

}  // namespace routesim
