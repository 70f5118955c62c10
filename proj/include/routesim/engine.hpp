#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "routesim/messages.hpp"
#include "routesim/types.hpp"

namespace routesim {

// Static facts a router knows about one of its interfaces.  The attachment
// lists describe the layer-2 segment behind the interface: hosts are
// originated into the protocol as directly connected destinations, routers
// are the candidates that hellos may turn into neighbors.
struct InterfaceInfo {
  InterfaceId id = 0;
  std::int64_t bandwidth_bps = 0;
  std::int64_t prop_delay_us = 0;
  std::vector<NodeId> attached_hosts;
  std::vector<NodeId> possible_neighbors;
  bool up = true;
};

// A control message an engine wants transmitted.  unicast_to empty means
// broadcast to the whole segment behind the interface.
struct Outbound {
  InterfaceId iface = 0;
  std::optional<NodeId> unicast_to;
  ProtocolMessage msg;
};

struct ForwardingEntry {
  NodeId next_hop = 0;
  InterfaceId out_interface = 0;
  Cost metric = 0;

  bool operator==(const ForwardingEntry&) const = default;
};

using ForwardingTable = std::map<NodeId, ForwardingEntry>;

// ============================================================================
// Interface every routing protocol implements.  The kernel drives instances
// through the four callbacks below; engines never touch the kernel directly,
// they only append messages to the Outbound list they are handed.
// ============================================================================
class RoutingEngine {
 public:
  RoutingEngine(NodeId self, std::vector<InterfaceInfo> interfaces)
      : self_(self), interfaces_(std::move(interfaces)) {}
  virtual ~RoutingEngine() = default;

  virtual std::string name() const = 0;

  // Fired once per simulated second.
  virtual void on_tick(SimTime now, std::vector<Outbound>& out) = 0;

  virtual void on_message(const ProtocolMessage& msg, InterfaceId in_iface,
                          SimTime now, std::vector<Outbound>& out) = 0;

  // Carrier transitions on a directly attached link.
  virtual void on_interface_down(InterfaceId iface, SimTime now,
                                 std::vector<Outbound>& out) = 0;
  virtual void on_interface_up(InterfaceId iface, SimTime now,
                               std::vector<Outbound>& out) = 0;

  // True while the engine knows its forwarding state is provisional (e.g. a
  // recomputation is scheduled but has not run yet).  Feeds the
  // convergence-activity metric alongside actual table changes.
  virtual bool convergence_pending() const { return false; }

  const ForwardingTable& forwarding_table() const { return table_; }

  // Incremented every time the forwarding table content changes.
  std::uint64_t table_version() const { return version_; }

  std::optional<Cost> route_metric(NodeId dest) const {
    auto it = table_.find(dest);
    if (it == table_.end()) return std::nullopt;
    return it->second.metric;
  }

  NodeId self() const { return self_; }
  const std::vector<InterfaceInfo>& interfaces() const { return interfaces_; }
  int malformed_count() const { return malformed_; }

 protected:
  // Replaces the forwarding table, bumping the version only on real change.
  void set_table(ForwardingTable t) {
    if (t != table_) {
      table_ = std::move(t);
      ++version_;
    }
  }

  InterfaceInfo* find_interface(InterfaceId id) {
    for (auto& i : interfaces_) {
      if (i.id == id) return &i;
    }
    return nullptr;
  }
  const InterfaceInfo* find_interface(InterfaceId id) const {
    return const_cast<RoutingEngine*>(this)->find_interface(id);
  }

  void set_interface_up(InterfaceId id, bool up) {
    if (auto* i = find_interface(id)) i->up = up;
  }

  static std::int64_t seconds(SimTime now) { return now / kMicrosPerSecond; }

  NodeId self_;
  std::vector<InterfaceInfo> interfaces_;
  int malformed_ = 0;

 private:
  ForwardingTable table_;
  std::uint64_t version_ = 0;
};

}  // namespace routesim
