#include "routesim/kernel.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace routesim {

// ============================================================================
// Event queue
// ============================================================================

void EventQueue::push(SimTime time, EventKind kind, EventPayload payload) {
  heap_.push(Event{time, next_seq_++, kind, std::move(payload)});
}

std::optional<Event> EventQueue::pop() {
  if (heap_.empty()) return std::nullopt;
  Event e = heap_.top();
  heap_.pop();
  return e;
}

// ============================================================================
// Construction
// ============================================================================

Kernel::Kernel(std::vector<KernelNode> nodes, std::vector<KernelLink> links,
               KernelOptions options)
    : options_(options), metrics_(options.duration_s, options.bucket_s) {
  if (options.duration_s < 0) {
    throw std::invalid_argument("duration must not be negative");
  }
  for (const auto& n : nodes) {
    auto [it, inserted] = nodes_.try_emplace(n.id);
    if (!inserted) throw std::invalid_argument("duplicate node id");
    it->second.cfg = n;
  }
  for (const auto& l : links) {
    if (l.a == l.b) throw std::invalid_argument("link endpoints equal");
    if (!nodes_.count(l.a) || !nodes_.count(l.b)) {
      throw std::invalid_argument("link references unknown node");
    }
    if (l.bandwidth_bps <= 0 || l.prop_delay_us < 0) {
      throw std::invalid_argument("bad link parameters");
    }
    std::size_t idx = links_.size();
    LinkState ls;
    ls.cfg = l;
    links_.push_back(std::move(ls));
    nodes_.at(l.a).links.push_back(idx);
    nodes_.at(l.b).links.push_back(idx);
  }
  compute_segments();
}

// Walk outward from each (node, interface) through any switches to find the
// stations sharing that layer-2 segment.  Membership is a static property of
// the wiring; it does not change with link status.
void Kernel::compute_segments() {
  for (auto& [nid, ns] : nodes_) {
    for (std::size_t i = 0; i < ns.links.size(); ++i) {
      std::vector<NodeId> members;
      std::set<NodeId> seen{nid};
      std::set<std::size_t> visited;
      std::deque<std::pair<std::size_t, NodeId>> frontier;
      frontier.push_back({ns.links[i], nid});
      while (!frontier.empty()) {
        auto [li, from] = frontier.front();
        frontier.pop_front();
        if (!visited.insert(li).second) continue;
        const auto& cfg = links_[li].cfg;
        NodeId other = (cfg.a == from) ? cfg.b : cfg.a;
        if (!seen.insert(other).second) continue;
        const auto& os = nodes_.at(other);
        if (os.cfg.kind == NodeKind::Switch) {
          for (std::size_t lj : os.links) {
            if (lj != li) frontier.push_back({lj, other});
          }
        } else {
          members.push_back(other);
        }
      }
      std::sort(members.begin(), members.end());
      segments_[{nid, static_cast<InterfaceId>(i)}] = std::move(members);
    }
  }
}

const std::vector<NodeId>& Kernel::segment_members(NodeId node,
                                                   InterfaceId iface) const {
  static const std::vector<NodeId> kEmpty;
  auto it = segments_.find({node, iface});
  return it == segments_.end() ? kEmpty : it->second;
}

std::vector<InterfaceInfo> Kernel::interfaces_for(NodeId node) const {
  const auto& ns = nodes_.at(node);
  std::vector<InterfaceInfo> out;
  for (std::size_t i = 0; i < ns.links.size(); ++i) {
    const auto& link = links_[ns.links[i]];
    InterfaceInfo info;
    info.id = static_cast<InterfaceId>(i);
    info.bandwidth_bps = link.cfg.bandwidth_bps;
    info.prop_delay_us = link.cfg.prop_delay_us;
    info.up = link.up;
    for (NodeId m : segment_members(node, info.id)) {
      switch (nodes_.at(m).cfg.kind) {
        case NodeKind::Host:
          info.attached_hosts.push_back(m);
          break;
        case NodeKind::Router:
          info.possible_neighbors.push_back(m);
          break;
        case NodeKind::Switch:
          break;
      }
    }
    out.push_back(std::move(info));
  }
  return out;
}

void Kernel::install_engines(const EngineFactory& factory) {
  for (auto& [id, ns] : nodes_) {
    if (ns.cfg.kind != NodeKind::Router) continue;
    ns.engine = factory(id, interfaces_for(id));
  }
}

void Kernel::add_flow(const KernelFlow& flow) {
  if (flow.rate_pps < 0 || flow.rate_bps < 0) {
    throw std::invalid_argument("bad flow rate");
  }
  if (!nodes_.count(flow.src) || !nodes_.count(flow.dst)) {
    throw std::invalid_argument("flow references unknown node");
  }
  flows_.push_back(flow);
  flow_counters_.try_emplace(flow.id);
}

void Kernel::schedule_status_change(std::int64_t time_s,
                                    std::size_t link_index, bool up) {
  if (link_index >= links_.size()) {
    throw std::invalid_argument("status change for unknown link");
  }
  scheduled_status_.push_back({time_s, StatusPayload{link_index, up}});
}

RoutingEngine* Kernel::engine(NodeId router) const {
  auto it = nodes_.find(router);
  if (it == nodes_.end()) return nullptr;
  return it->second.engine.get();
}

std::int64_t Kernel::generated_total() const {
  std::int64_t t = 0;
  for (const auto& [id, fc] : flow_counters_) t += fc.generated;
  return t;
}
std::int64_t Kernel::delivered_total() const {
  std::int64_t t = 0;
  for (const auto& [id, fc] : flow_counters_) t += fc.delivered;
  return t;
}
std::int64_t Kernel::data_dropped_total() const {
  std::int64_t t = 0;
  for (const auto& [id, fc] : flow_counters_) t += fc.dropped;
  return t;
}

// ============================================================================
// Main loop
// ============================================================================

void Kernel::run() {
  // All timer ticks are scheduled before anything else, so at any given
  // second the tick precedes same-instant status changes and traffic.
  for (std::int64_t s = 0; s < options_.duration_s; ++s) {
    queue_.push(s * kMicrosPerSecond, EventKind::TimerTick, TickPayload{s});
  }
  for (const auto& [t_s, sp] : scheduled_status_) {
    queue_.push(t_s * kMicrosPerSecond, EventKind::LinkStatusChange, sp);
  }
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const auto& f = flows_[i];
    if (f.rate_pps <= 0 || f.start_s >= f.stop_s) continue;
    queue_.push(f.start_s * kMicrosPerSecond, EventKind::PacketGeneration,
                GenPayload{i, 0});
  }

  const SimTime end = options_.duration_s * kMicrosPerSecond;
  while (auto ev = queue_.pop()) {
    if (ev->time >= end) break;
    if (options_.record_trace) {
      trace_.push_back({ev->time, ev->seq, ev->kind});
    }
    SimTime now = ev->time;
    std::visit(
        [&](auto& payload) {
          using T = std::decay_t<decltype(payload)>;
          if constexpr (std::is_same_v<T, TickPayload>) {
            handle_tick(payload, now);
          } else if constexpr (std::is_same_v<T, ArrivalPayload>) {
            handle_arrival(payload, now);
          } else if constexpr (std::is_same_v<T, StatusPayload>) {
            handle_status(payload, now);
          } else {
            handle_generation(payload, now);
          }
        },
        ev->payload);
  }
}

// ============================================================================
// Event handlers
// ============================================================================

void Kernel::handle_tick(const TickPayload&, SimTime now) {
  for (auto& [id, ns] : nodes_) {
    if (ns.cfg.kind != NodeKind::Router || !ns.engine) continue;
    invoke_engine(id, now, [&](RoutingEngine& e, std::vector<Outbound>& out) {
      e.on_tick(now, out);
    });
  }
}

void Kernel::handle_arrival(const ArrivalPayload& p, SimTime now) {
  if (cancelled_.erase(p.frame_id) > 0) return;  // flushed by a link failure
  const auto& link = links_[p.link_index];
  NodeId to = (p.direction == 0) ? link.cfg.b : link.cfg.a;
  deliver_to_node(to, iface_of(to, p.link_index), p.frame, now);
}

void Kernel::handle_status(const StatusPayload& p, SimTime now) {
  auto& link = links_[p.link_index];
  if (link.up == p.up) {
    ++warnings_;  // redundant transition, ignore
    return;
  }
  link.up = p.up;
  status_log_.push_back({now, p.link_index, p.up});

  if (!p.up) {
    // Frames still being clocked out are lost; frames already past the
    // transmitter keep propagating and arrive normally.
    for (auto& ds : link.dir) {
      for (const auto& q : ds.queued) {
        if (q.finish > now) {
          cancelled_.insert(q.id);
          drop_frame(q.frame, DropReason::LinkDown, now);
        }
      }
      ds.queued.clear();
      ds.busy_until = now;
    }
  }

  for (NodeId endpoint : {link.cfg.a, link.cfg.b}) {
    auto& ns = nodes_.at(endpoint);
    InterfaceId iface = iface_of(endpoint, p.link_index);
    if (ns.cfg.kind == NodeKind::Switch) {
      if (!p.up) {
        // Forget stations learned through the dead port so later frames
        // flood instead of chasing a stale entry.
        for (auto it = ns.mac_table.begin(); it != ns.mac_table.end();) {
          if (it->second == iface) {
            it = ns.mac_table.erase(it);
          } else {
            ++it;
          }
        }
      }
      continue;
    }
    if (ns.cfg.kind != NodeKind::Router || !ns.engine) continue;
    invoke_engine(endpoint, now,
                  [&](RoutingEngine& e, std::vector<Outbound>& out) {
                    if (p.up) {
                      e.on_interface_up(iface, now, out);
                    } else {
                      e.on_interface_down(iface, now, out);
                    }
                  });
  }
}

void Kernel::handle_generation(const GenPayload& p, SimTime now) {
  const KernelFlow& f = flows_.at(p.flow_index);

  Packet pkt;
  pkt.flow_id = f.id;
  pkt.src = f.src;
  pkt.dst = f.dst;
  pkt.size_bits = static_cast<int>(f.rate_bps / f.rate_pps);
  pkt.created_at = now;
  pkt.ttl = options_.initial_ttl;

  ++flow_counters_[f.id].generated;
  ++alive_data_;
  originate_packet(f.src, pkt, now);

  std::int64_t k1 = p.k + 1;
  SimTime t1 =
      f.start_s * kMicrosPerSecond + (k1 * kMicrosPerSecond) / f.rate_pps;
  if (t1 < f.stop_s * kMicrosPerSecond) {
    queue_.push(t1, EventKind::PacketGeneration, GenPayload{p.flow_index, k1});
  }
}

// ============================================================================
// Station behaviour
// ============================================================================

void Kernel::originate_packet(NodeId src, Packet pkt, SimTime now) {
  auto& ns = nodes_.at(src);

  // Destination on a directly attached segment: plain layer-2 delivery.
  for (std::size_t i = 0; i < ns.links.size(); ++i) {
    auto iface = static_cast<InterfaceId>(i);
    const auto& members = segment_members(src, iface);
    if (std::binary_search(members.begin(), members.end(), pkt.dst)) {
      enqueue_frame(src, iface, Frame{src, pkt.dst, pkt}, now);
      return;
    }
  }

  if (ns.cfg.kind == NodeKind::Router && ns.engine) {
    const auto& table = ns.engine->forwarding_table();
    auto it = table.find(pkt.dst);
    if (it == table.end()) {
      drop_frame(Frame{src, kBroadcast, pkt}, DropReason::NoRoute, now);
      return;
    }
    enqueue_frame(src, it->second.out_interface,
                  Frame{src, it->second.next_hop, pkt}, now);
    return;
  }

  // Host: hand the packet to the segment router currently advertising the
  // best metric toward the destination; ties go to the lowest router id.
  bool found = false;
  Cost best_metric = 0;
  NodeId best_gw = 0;
  InterfaceId best_iface = 0;
  for (std::size_t i = 0; i < ns.links.size(); ++i) {
    auto iface = static_cast<InterfaceId>(i);
    for (NodeId r : segment_members(src, iface)) {
      const auto& rs = nodes_.at(r);
      if (rs.cfg.kind != NodeKind::Router || !rs.engine) continue;
      auto metric = rs.engine->route_metric(pkt.dst);
      if (!metric) continue;
      if (!found || *metric < best_metric ||
          (*metric == best_metric && r < best_gw)) {
        found = true;
        best_metric = *metric;
        best_gw = r;
        best_iface = iface;
      }
    }
  }
  if (!found) {
    drop_frame(Frame{src, kBroadcast, pkt}, DropReason::NoRoute, now);
    return;
  }
  enqueue_frame(src, best_iface, Frame{src, best_gw, pkt}, now);
}

void Kernel::deliver_to_node(NodeId node_id, InterfaceId in_iface,
                             const Frame& frame, SimTime now) {
  auto& ns = nodes_.at(node_id);
  switch (ns.cfg.kind) {
    case NodeKind::Switch:
      relay_at_switch(ns, in_iface, frame, now);
      return;

    case NodeKind::Router: {
      if (frame.is_control()) {
        if (frame.l2_dst == kBroadcast || frame.l2_dst == node_id) {
          const auto msg = std::get<ProtocolMessage>(frame.payload);
          invoke_engine(node_id, now,
                        [&](RoutingEngine& e, std::vector<Outbound>& out) {
                          e.on_message(msg, in_iface, now, out);
                        });
        }
        return;
      }
      if (frame.l2_dst != kBroadcast && frame.l2_dst != node_id) return;
      const auto& pkt = std::get<Packet>(frame.payload);
      if (pkt.dst == node_id) {
        deliver_packet(pkt, now);
        return;
      }
      forward_data_at_router(ns, frame, now);
      return;
    }

    case NodeKind::Host: {
      if (frame.is_control()) return;  // hosts ignore routing chatter
      if (frame.l2_dst != kBroadcast && frame.l2_dst != node_id) return;
      const auto& pkt = std::get<Packet>(frame.payload);
      if (pkt.dst != node_id) return;
      deliver_packet(pkt, now);
      return;
    }
  }
}

void Kernel::deliver_packet(const Packet& pkt, SimTime now) {
  ++flow_counters_[pkt.flow_id].delivered;
  --alive_data_;
  metrics_.record_delivery(now, now - pkt.created_at, pkt.hops_traversed);
}

void Kernel::forward_data_at_router(NodeState& node, const Frame& frame,
                                    SimTime now) {
  Packet pkt = std::get<Packet>(frame.payload);
  if (pkt.ttl <= 1) {
    drop_frame(frame, DropReason::Ttl, now);
    return;
  }
  if (!node.engine) {
    drop_frame(frame, DropReason::NoRoute, now);
    return;
  }
  const auto& table = node.engine->forwarding_table();
  auto it = table.find(pkt.dst);
  if (it == table.end()) {
    drop_frame(frame, DropReason::NoRoute, now);
    return;
  }
  --pkt.ttl;
  ++pkt.hops_traversed;
  enqueue_frame(node.cfg.id, it->second.out_interface,
                Frame{node.cfg.id, it->second.next_hop, pkt},
                now + node.cfg.processing_delay_us);
}

void Kernel::relay_at_switch(NodeState& node, InterfaceId in_iface,
                             const Frame& frame, SimTime now) {
  node.mac_table[frame.l2_src] = in_iface;

  auto flood = [&] {
    for (std::size_t i = 0; i < node.links.size(); ++i) {
      auto iface = static_cast<InterfaceId>(i);
      if (iface == in_iface) continue;
      if (!links_[node.links[i]].up) continue;  // skip dead ports silently
      enqueue_frame(node.cfg.id, iface, frame, now);
    }
  };

  if (frame.l2_dst == kBroadcast) {
    flood();
    return;
  }
  auto it = node.mac_table.find(frame.l2_dst);
  if (it == node.mac_table.end()) {
    flood();
    return;
  }
  if (it->second == in_iface) return;  // already on the right segment
  enqueue_frame(node.cfg.id, it->second, frame, now);
}

// ============================================================================
// Links
// ============================================================================

void Kernel::enqueue_frame(NodeId from, InterfaceId iface, const Frame& frame,
                           SimTime now) {
  auto& ns = nodes_.at(from);
  std::size_t li = ns.links.at(static_cast<std::size_t>(iface));
  auto& link = links_[li];
  if (!link.up) {
    drop_frame(frame, DropReason::LinkDown, now);
    return;
  }
  auto& ds = link.dir[direction_from(from, link)];
  while (!ds.queued.empty() && ds.queued.front().finish <= now) {
    ds.queued.pop_front();
  }
  if (static_cast<int>(ds.queued.size()) >= options_.queue_capacity) {
    drop_frame(frame, DropReason::Congestion, now);
    return;
  }
  std::int64_t bits = frame.size_bits();
  SimTime start = std::max(now, ds.busy_until);
  SimTime tx = (bits * kMicrosPerSecond + link.cfg.bandwidth_bps - 1) /
               link.cfg.bandwidth_bps;
  SimTime finish = start + tx;
  ds.busy_until = finish;
  std::uint64_t id = next_frame_id_++;
  ds.queued.push_back({id, finish, frame});
  queue_.push(finish + link.cfg.prop_delay_us,
              frame.is_control() ? EventKind::ProtocolMessageDelivery
                                 : EventKind::PacketArrival,
              ArrivalPayload{li, direction_from(from, link), id, frame});
  if (frame.is_control()) metrics_.record_control_bits(now, bits);
}

void Kernel::drop_frame(const Frame& frame, DropReason reason, SimTime now) {
  bool data = !frame.is_control();
  metrics_.record_drop(now, reason, data);
  if (data) {
    const auto& pkt = std::get<Packet>(frame.payload);
    ++flow_counters_[pkt.flow_id].dropped;
    --alive_data_;
  }
}

InterfaceId Kernel::iface_of(NodeId node, std::size_t link_index) const {
  const auto& ls = nodes_.at(node).links;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i] == link_index) return static_cast<InterfaceId>(i);
  }
  throw std::logic_error("node not attached to link");
}

// ============================================================================
// Engine plumbing
// ============================================================================

// Every engine callback funnels through here: convergence activity is marked
// whenever the callback changed the forwarding table or left a recomputation
// pending, and any messages the engine produced are put on the wire.
template <typename Fn>
void Kernel::invoke_engine(NodeId router, SimTime now, Fn&& fn) {
  auto& ns = nodes_.at(router);
  if (!ns.engine) return;
  std::uint64_t before = ns.engine->table_version();
  std::vector<Outbound> out;
  fn(*ns.engine, out);
  if (ns.engine->table_version() != before ||
      ns.engine->convergence_pending()) {
    metrics_.mark_convergence(now);
  }
  for (const auto& ob : out) send_outbound(router, ob, now);
}

void Kernel::send_outbound(NodeId router, const Outbound& ob, SimTime now) {
  Frame frame;
  frame.l2_src = router;
  frame.l2_dst = ob.unicast_to ? *ob.unicast_to : kBroadcast;
  frame.payload = ob.msg;
  enqueue_frame(router, ob.iface, frame, now);
}

}  // namespace routesim
