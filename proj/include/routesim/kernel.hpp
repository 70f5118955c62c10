#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

#include "routesim/engine.hpp"
#include "routesim/messages.hpp"
#include "routesim/metrics.hpp"
#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// Deterministic discrete-event simulation core: a single (time, seq)-ordered
// event queue, packet-level links with FIFO transmit queues, learning
// switches, routing engines on routers, failure injection, and constant-rate
// traffic sources.
// ============================================================================

enum class NodeKind { Host, Switch, Router };

enum class EventKind {
  PacketArrival,
  TimerTick,
  LinkStatusChange,
  ProtocolMessageDelivery,
  PacketGeneration,
};

struct Packet {
  int flow_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  int size_bits = 0;
  SimTime created_at = 0;
  int hops_traversed = 0;
  int ttl = 32;
};

// Layer-2 frame: a data packet or a control message addressed to a station
// on the segment (or to everyone, kBroadcast).
struct Frame {
  NodeId l2_src = 0;
  NodeId l2_dst = kBroadcast;
  std::variant<Packet, ProtocolMessage> payload;

  bool is_control() const {
    return std::holds_alternative<ProtocolMessage>(payload);
  }
  int size_bits() const {
    if (is_control()) {
      return message_size_bits(std::get<ProtocolMessage>(payload));
    }
    return std::get<Packet>(payload).size_bits;
  }
};

struct TickPayload {
  std::int64_t second = 0;
};
struct ArrivalPayload {
  std::size_t link_index = 0;
  int direction = 0;  // 0: a->b, 1: b->a
  std::uint64_t frame_id = 0;
  Frame frame;
};
struct StatusPayload {
  std::size_t link_index = 0;
  bool up = false;
};
struct GenPayload {
  std::size_t flow_index = 0;
  std::int64_t k = 0;  // packet ordinal within the flow
};
using EventPayload =
    std::variant<TickPayload, ArrivalPayload, StatusPayload, GenPayload>;

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::TimerTick;
  EventPayload payload;
};

// Min-queue over (time, seq): FIFO among equal times, time never decreases
// across pops.
class EventQueue {
 public:
  void push(SimTime time, EventKind kind, EventPayload payload);
  std::optional<Event> pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Order {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Order> heap_;
  std::uint64_t next_seq_ = 0;
};

struct KernelNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Host;
  std::int64_t processing_delay_us = 0;  // per forwarded packet, routers only
};

struct KernelLink {
  NodeId a = 0;
  NodeId b = 0;
  std::int64_t bandwidth_bps = 0;
  std::int64_t prop_delay_us = 0;
};

struct KernelFlow {
  int id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t start_s = 0;
  std::int64_t stop_s = 0;
  std::int64_t rate_pps = 0;
  std::int64_t rate_bps = 0;
};

struct LinkStatusEvent {
  SimTime time = 0;
  std::size_t link_index = 0;
  bool up = false;
};

struct FlowCounters {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
};

struct EventRecord {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::TimerTick;

  bool operator==(const EventRecord&) const = default;
};

struct KernelOptions {
  std::int64_t duration_s = 0;
  std::int64_t bucket_s = 1;
  int queue_capacity = 64;  // frames per link direction
  int initial_ttl = 32;
  bool record_trace = false;
};

class Kernel {
 public:
  using EngineFactory = std::function<std::unique_ptr<RoutingEngine>(
      NodeId, std::vector<InterfaceInfo>)>;

  Kernel(std::vector<KernelNode> nodes, std::vector<KernelLink> links,
         KernelOptions options);

  // Builds one engine per router from its derived interface facts.
  void install_engines(const EngineFactory& factory);

  void add_flow(const KernelFlow& flow);
  void schedule_status_change(std::int64_t time_s, std::size_t link_index,
                              bool up);

  void run();

  // --- introspection -------------------------------------------------------
  const MetricsCollector& metrics() const { return metrics_; }
  RoutingEngine* engine(NodeId router) const;
  const std::vector<LinkStatusEvent>& status_log() const {
    return status_log_;
  }
  const std::vector<EventRecord>& trace() const { return trace_; }
  const std::map<int, FlowCounters>& flow_counters() const {
    return flow_counters_;
  }
  std::int64_t generated_total() const;
  std::int64_t delivered_total() const;
  std::int64_t data_dropped_total() const;
  std::int64_t in_flight_at_end() const { return alive_data_; }
  int warning_count() const { return warnings_; }

  // Interface facts a router on this topology would be configured with.
  std::vector<InterfaceInfo> interfaces_for(NodeId node) const;
  // Non-switch stations reachable at layer 2 through interface `iface`.
  const std::vector<NodeId>& segment_members(NodeId node,
                                             InterfaceId iface) const;

 private:
  struct QueuedFrame {
    std::uint64_t id = 0;
    SimTime finish = 0;  // instant the last bit leaves the transmitter
    Frame frame;
  };
  struct DirState {
    SimTime busy_until = 0;
    std::deque<QueuedFrame> queued;
  };
  struct LinkState {
    KernelLink cfg;
    bool up = true;
    DirState dir[2];
  };
  struct NodeState {
    KernelNode cfg;
    std::vector<std::size_t> links;  // link index per interface id
    std::unique_ptr<RoutingEngine> engine;
    std::map<NodeId, InterfaceId> mac_table;  // switches only
  };

  void compute_segments();
  void handle_tick(const TickPayload& p, SimTime now);
  void handle_arrival(const ArrivalPayload& p, SimTime now);
  void handle_status(const StatusPayload& p, SimTime now);
  void handle_generation(const GenPayload& p, SimTime now);

  void originate_packet(NodeId src, Packet pkt, SimTime now);
  void deliver_to_node(NodeId node, InterfaceId in_iface, const Frame& frame,
                       SimTime now);
  void deliver_packet(const Packet& pkt, SimTime now);
  void forward_data_at_router(NodeState& node, const Frame& frame,
                              SimTime now);
  void relay_at_switch(NodeState& node, InterfaceId in_iface,
                       const Frame& frame, SimTime now);

  void enqueue_frame(NodeId from, InterfaceId iface, const Frame& frame,
                     SimTime now);
  void drop_frame(const Frame& frame, DropReason reason, SimTime now);

  template <typename Fn>
  void invoke_engine(NodeId router, SimTime now, Fn&& fn);
  void send_outbound(NodeId router, const Outbound& ob, SimTime now);

  int direction_from(NodeId from, const LinkState& link) const {
    return from == link.cfg.a ? 0 : 1;
  }
  InterfaceId iface_of(NodeId node, std::size_t link_index) const;

  KernelOptions options_;
  std::map<NodeId, NodeState> nodes_;
  std::vector<LinkState> links_;
  std::vector<KernelFlow> flows_;
  std::vector<std::pair<std::int64_t, StatusPayload>> scheduled_status_;

  // (node, iface) -> non-switch co-members behind that interface.
  std::map<std::pair<NodeId, InterfaceId>, std::vector<NodeId>> segments_;

  EventQueue queue_;
  MetricsCollector metrics_;
  std::vector<LinkStatusEvent> status_log_;
  std::vector<EventRecord> trace_;
  std::map<int, FlowCounters> flow_counters_;
  std::set<std::uint64_t> cancelled_;
  std::uint64_t next_frame_id_ = 0;
  std::int64_t alive_data_ = 0;
  int warnings_ = 0;
};

}  // namespace routesim
